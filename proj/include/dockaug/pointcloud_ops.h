#ifndef DOCKAUG_POINTCLOUD_OPS_H_
#define DOCKAUG_POINTCLOUD_OPS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "dockaug/demo_model.h"

namespace dockaug {

struct Aabb {
  Vec3 min_corner = Vec3::Zero();
  Vec3 max_corner = Vec3::Zero();

  Aabb() = default;
  Aabb(const Vec3& min_corner, const Vec3& max_corner);

  // Closed-interval membership.
  bool Contains(const Vec3& p) const {
    return (p.array() >= min_corner.array()).all() &&
           (p.array() <= max_corner.array()).all();
  }
};

// Keeps the points inside the closed box, in input order.
PointCloud CropAabb(const PointCloud& pc, const Aabb& box);

// Greedy farthest point sampling. The first selected index is seed mod N;
// every later pick maximizes the distance to the selected set, lowest index
// winning ties. Returns indices in selection order.
std::vector<std::size_t> FarthestPointIndices(std::span<const Vec3> points,
                                              std::size_t k,
                                              std::uint64_t seed);

PointCloud FpsDownsample(const PointCloud& pc, std::size_t k,
                         std::uint64_t seed);

PointCloud Subset(const PointCloud& pc, std::span<const std::size_t> indices);

PointCloud ExtractCluster(const PointCloud& pc, Label label);

Vec3 Centroid(std::span<const Vec3> points);
Vec3 Centroid(const PointCloud& pc);

PointCloud Concat(std::span<const PointCloud> parts);

}  // namespace dockaug

#endif  // DOCKAUG_POINTCLOUD_OPS_H_
