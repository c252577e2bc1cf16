#include "dockaug/pointcloud_ops.h"

#include <limits>
#include <string>

#include "dockaug/error.h"

namespace dockaug {

Aabb::Aabb(const Vec3& min_c, const Vec3& max_c)
    : min_corner(min_c), max_corner(max_c) {
  if ((min_corner.array() > max_corner.array()).any()) {
    throw Error(ErrorKind::kInvariant, "aabb min corner exceeds max corner");
  }
}

PointCloud Subset(const PointCloud& pc, std::span<const std::size_t> indices) {
  PointCloud out;
  out.points.reserve(indices.size());
  out.labels.reserve(indices.size());
  if (pc.colors) out.colors.emplace().reserve(indices.size());
  for (std::size_t i : indices) {
    out.points.push_back(pc.points[i]);
    out.labels.push_back(pc.labels[i]);
    if (pc.colors) out.colors->push_back((*pc.colors)[i]);
  }
  return out;
}

PointCloud CropAabb(const PointCloud& pc, const Aabb& box) {
  std::vector<std::size_t> keep;
  keep.reserve(pc.size());
  for (std::size_t i = 0; i < pc.size(); ++i) {
    if (box.Contains(pc.points[i])) keep.push_back(i);
  }
  return Subset(pc, keep);
}

std::vector<std::size_t> FarthestPointIndices(std::span<const Vec3> points,
                                              std::size_t k,
                                              std::uint64_t seed) {
  const std::size_t n = points.size();
  if (k == 0 || k > n) {
    throw Error(ErrorKind::kSize, "fps: cannot select " + std::to_string(k) +
                                      " of " + std::to_string(n) + " points");
  }
  std::vector<std::size_t> selected;
  selected.reserve(k);
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::size_t current = static_cast<std::size_t>(seed % n);
  selected.push_back(current);
  min_dist[current] = -1.0;
  while (selected.size() < k) {
    const Vec3 c = points[current];
    std::size_t best = n;
    double best_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_dist[i] < 0.0) continue;
      const double d = (points[i] - c).squaredNorm();
      if (d < min_dist[i]) min_dist[i] = d;
      if (min_dist[i] > best_dist) {
        best_dist = min_dist[i];
        best = i;
      }
    }
    current = best;
    selected.push_back(current);
    min_dist[current] = -1.0;
  }
  return selected;
}

PointCloud FpsDownsample(const PointCloud& pc, std::size_t k,
                         std::uint64_t seed) {
  const std::vector<std::size_t> idx =
      FarthestPointIndices(pc.points, k, seed);
  return Subset(pc, idx);
}

PointCloud ExtractCluster(const PointCloud& pc, Label label) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    if (pc.labels[i] == label) keep.push_back(i);
  }
  return Subset(pc, keep);
}

Vec3 Centroid(std::span<const Vec3> points) {
  if (points.empty()) {
    throw Error(ErrorKind::kEmptyInput, "centroid of an empty point set");
  }
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

Vec3 Centroid(const PointCloud& pc) { return Centroid(pc.points); }

PointCloud Concat(std::span<const PointCloud> parts) {
  PointCloud out;
  bool any_colors = false;
  bool all_colors = true;
  std::size_t total = 0;
  for (const PointCloud& p : parts) {
    total += p.size();
    if (p.empty()) continue;
    any_colors |= p.colors.has_value();
    all_colors &= p.colors.has_value();
  }
  out.points.reserve(total);
  out.labels.reserve(total);
  const bool keep_colors = any_colors && all_colors;
  if (keep_colors) out.colors.emplace().reserve(total);
  for (const PointCloud& p : parts) {
    out.points.insert(out.points.end(), p.points.begin(), p.points.end());
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    if (keep_colors && p.colors) {
      out.colors->insert(out.colors->end(), p.colors->begin(),
                         p.colors->end());
    }
  }
  return out;
}

}  // namespace dockaug
