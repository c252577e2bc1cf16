#ifndef DOCKAUG_GEOMETRY_H_
#define DOCKAUG_GEOMETRY_H_

#include <Eigen/Geometry>
#include <span>
#include <vector>

namespace dockaug {

using Vec3 = Eigen::Vector3d;
using Quat = Eigen::Quaterniond;

// SE(3) pose: position in meters and a unit quaternion stored (w, x, y, z).
// The quaternion is normalized on construction, so every Pose value holds a
// unit rotation.
class Pose {
 public:
  Pose() : position_(Vec3::Zero()), orientation_(Quat::Identity()) {}
  Pose(const Vec3& position, const Quat& orientation);

  static Pose Identity() { return Pose(); }
  static Pose Translation(double x, double y, double z);
  static Pose RotZ(double angle);

  const Vec3& position() const { return position_; }
  const Quat& orientation() const { return orientation_; }

  Eigen::Matrix3d rotation() const { return orientation_.toRotationMatrix(); }
  Eigen::Isometry3d ToIsometry() const;

  // Maps a point expressed in this frame into the parent frame.
  Vec3 operator*(const Vec3& point) const {
    return orientation_ * point + position_;
  }

  friend bool operator==(const Pose& a, const Pose& b) {
    return a.position_ == b.position_ &&
           a.orientation_.coeffs() == b.orientation_.coeffs();
  }

 private:
  Vec3 position_;
  Quat orientation_;
};

// Relative frame-to-frame map. Same layout as Pose; kept as a distinct type so
// that deltas and absolute poses are not mixed up by accident.
class RigidTransform {
 public:
  RigidTransform() = default;
  explicit RigidTransform(const Pose& delta) : delta_(delta) {}

  const Pose& delta() const { return delta_; }
  bool IsIdentity(double tolerance) const;

 private:
  Pose delta_;
};

// Planar docking pose. Yaw is kept in (-pi, pi].
class PlanarPose {
 public:
  PlanarPose() = default;
  PlanarPose(double x, double y, double yaw);

  double x() const { return x_; }
  double y() const { return y_; }
  double yaw() const { return yaw_; }
  Eigen::Vector2d xy() const { return {x_, y_}; }

  friend bool operator==(const PlanarPose&, const PlanarPose&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double yaw_ = 0.0;
};

double NormalizeAngle(double angle);

// compose(a, b) applies b first, then a.
Pose Compose(const Pose& a, const Pose& b);
Pose Inverse(const Pose& a);

// Returns inverse(src) * dst, so that Compose(src, result) == dst.
RigidTransform RelativeTransform(const Pose& src, const Pose& dst);

// Applies `transform` to world points through `anchor`: each point is
// expressed in the anchor frame, mapped by the transform, and expressed back
// in world coordinates. An identity transform leaves points untouched.
void TransformPointsInPlace(std::span<Vec3> points,
                           const RigidTransform& transform,
                           const Pose& anchor);
std::vector<Vec3> TransformPoints(std::span<const Vec3> points,
                                  const RigidTransform& transform,
                                  const Pose& anchor);

Pose PlanarToWorld(const PlanarPose& planar, double base_height);
PlanarPose WorldToPlanar(const Pose& pose);

// Geodesic angle between two rotations, in radians; insensitive to the
// quaternion sign.
double RotationDistance(const Quat& a, const Quat& b);

// Linear position, spherical orientation interpolation. s in [0, 1].
Pose Interpolate(const Pose& a, const Pose& b, double s);

// Quaternion with non-negative w, for use as a feature vector.
Quat CanonicalQuat(const Quat& q);

}  // namespace dockaug

#endif  // DOCKAUG_GEOMETRY_H_
