#ifndef DOCKAUG_SCENE_H_
#define DOCKAUG_SCENE_H_

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dockaug/demo_model.h"
#include "dockaug/geometry.h"
#include "dockaug/pointcloud_ops.h"

namespace dockaug {

struct Shape {
  enum class Kind { kSphere, kBox };

  Kind kind = Kind::kSphere;
  Pose pose;                        // center and orientation
  double radius = 0.0;              // sphere
  Vec3 half_extents = Vec3::Zero(); // box

  static Shape Sphere(const Vec3& center, double radius);
  static Shape Box(const Pose& pose, const Vec3& half_extents);

  // Negative inside, zero on the surface.
  double SignedDistance(const Vec3& p) const;
  // Highest z reached by the shape.
  double Top() const;
};

// Minimum signed distance between the shape and the segment [a, b].
double SegmentSignedDistance(const Shape& shape, const Vec3& a, const Vec3& b);

// Smallest t in [0, 1] where a + t (b - a) touches the shape, if any.
std::optional<double> SegmentFirstHit(const Shape& shape, const Vec3& a,
                                      const Vec3& b);

using Polygon2 = std::vector<Eigen::Vector2d>;

// Convex polygon vs open disk. Touching does not count as intersecting.
bool DiskIntersectsPolygon(const Eigen::Vector2d& center, double radius,
                           const Polygon2& polygon);

struct SceneObject {
  std::string id;
  Shape shape;
  // Task objects carry a label and a point cluster (world frame, initial
  // configuration). Fixtures such as tables have neither.
  std::optional<Label> label;
  std::vector<Vec3> points;
  bool movable = false;
};

// Optical axis is +z of the camera frame, +x right, +y down.
struct Camera {
  Pose pose;
  double hfov = 1.0;  // radians
  double vfov = 0.8;

  bool InFrustum(const Vec3& world_point) const;
};

// Reach annulus relative to the base: horizontal radius and absolute height.
struct Workspace {
  double r_min = 0.25;
  double r_max = 0.9;
  double z_min = 0.3;
  double z_max = 1.1;

  // Signed distance to the annulus boundary in the (radius, height) plane;
  // positive inside.
  double Margin(const PlanarPose& dock, const Vec3& p) const;
};

struct RobotModel {
  double footprint_radius = 0.22;
  Eigen::Vector2d body_half_extents{0.2, 0.2};
  double body_height = 1.1;
  double base_height = 0.0;
  Pose home;  // end-effector rest pose relative to the base frame

  Shape BodyAt(const PlanarPose& dock) const;
};

struct PickLift {
  std::string object_id;
  double dz = 0.05;
};
struct PlaceInto {
  std::string object_id;
  Aabb region;
};
struct ReachPose {
  Pose pose;
  double tolerance = 0.01;
};
using SuccessPredicate = std::variant<PickLift, PlaceInto, ReachPose>;

struct Scene {
  std::string id;
  std::vector<SceneObject> objects;
  std::vector<Vec3> background;  // labeled "other"
  Camera camera;
  Workspace workspace;
  std::vector<Polygon2> floorplan;
  RobotModel robot;
  Aabb crop;
  std::optional<SuccessPredicate> task;
  double grasp_radius = 0.05;

  const SceneObject* FindObject(const std::string& id) const;
  const SceneObject* FindByLabel(Label label) const;
  LabelTable Labels() const;
};

// Throws on invariant violations (annulus bounds, FOV range, labels).
void ValidateScene(const Scene& scene);

std::string SceneToJson(const Scene& scene);
Scene SceneFromJson(const std::string& text);
void WriteSceneFile(const Scene& scene, const std::filesystem::path& path);
Scene ReadSceneFile(const std::filesystem::path& path);

}  // namespace dockaug

#endif  // DOCKAUG_SCENE_H_
