#include "dockaug/geometry.h"

#include <cmath>
#include <numbers>

#include "dockaug/error.h"

namespace dockaug {

Pose::Pose(const Vec3& position, const Quat& orientation)
    : position_(position), orientation_(orientation) {
  const double norm = orientation_.norm();
  if (!(norm > 1e-12) || !std::isfinite(norm)) {
    throw Error(ErrorKind::kInvariant, "pose orientation has zero norm");
  }
  if (norm != 1.0) orientation_.coeffs() /= norm;
}

Pose Pose::Translation(double x, double y, double z) {
  return Pose(Vec3(x, y, z), Quat::Identity());
}

Pose Pose::RotZ(double angle) {
  return Pose(Vec3::Zero(), Quat(Eigen::AngleAxisd(angle, Vec3::UnitZ())));
}

Eigen::Isometry3d Pose::ToIsometry() const {
  Eigen::Isometry3d iso = Eigen::Isometry3d::Identity();
  iso.linear() = rotation();
  iso.translation() = position_;
  return iso;
}

bool RigidTransform::IsIdentity(double tolerance) const {
  return delta_.position().norm() <= tolerance &&
         RotationDistance(delta_.orientation(), Quat::Identity()) <= tolerance;
}

double NormalizeAngle(double angle) {
  double a = std::remainder(angle, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

PlanarPose::PlanarPose(double x, double y, double yaw)
    : x_(x), y_(y), yaw_(NormalizeAngle(yaw)) {}

Pose Compose(const Pose& a, const Pose& b) {
  return Pose(a.orientation() * b.position() + a.position(),
              a.orientation() * b.orientation());
}

Pose Inverse(const Pose& a) {
  const Quat inv = a.orientation().conjugate();
  return Pose(-(inv * a.position()), inv);
}

RigidTransform RelativeTransform(const Pose& src, const Pose& dst) {
  if (src == dst) return RigidTransform(Pose::Identity());
  return RigidTransform(Compose(Inverse(src), dst));
}

namespace {

bool IsExactIdentity(const Pose& p) {
  return p.position().isZero(0.0) && p.orientation().w() == 1.0 &&
         p.orientation().vec().isZero(0.0);
}

}  // namespace

void TransformPointsInPlace(std::span<Vec3> points,
                           const RigidTransform& transform,
                           const Pose& anchor) {
  if (IsExactIdentity(transform.delta())) return;
  const Pose world_map =
      Compose(anchor, Compose(transform.delta(), Inverse(anchor)));
  const Eigen::Matrix3d rot = world_map.rotation();
  const Vec3& trans = world_map.position();
  for (Vec3& p : points) p = rot * p + trans;
}

std::vector<Vec3> TransformPoints(std::span<const Vec3> points,
                                  const RigidTransform& transform,
                                  const Pose& anchor) {
  std::vector<Vec3> out(points.begin(), points.end());
  TransformPointsInPlace(out, transform, anchor);
  return out;
}

Pose PlanarToWorld(const PlanarPose& planar, double base_height) {
  return Pose(Vec3(planar.x(), planar.y(), base_height),
              Quat(Eigen::AngleAxisd(planar.yaw(), Vec3::UnitZ())));
}

PlanarPose WorldToPlanar(const Pose& pose) {
  const Eigen::Matrix3d r = pose.rotation();
  return PlanarPose(pose.position().x(), pose.position().y(),
                    std::atan2(r(1, 0), r(0, 0)));
}

double RotationDistance(const Quat& a, const Quat& b) {
  // atan2 form stays accurate near zero, where acos of the dot product loses
  // half of the significant digits.
  const Quat rel = a.conjugate() * b;
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

Pose Interpolate(const Pose& a, const Pose& b, double s) {
  if (s <= 0.0) return a;
  if (s >= 1.0) return b;
  return Pose(a.position() + s * (b.position() - a.position()),
              a.orientation().slerp(s, b.orientation()));
}

Quat CanonicalQuat(const Quat& q) {
  if (q.w() < 0.0) return Quat(-q.w(), -q.x(), -q.y(), -q.z());
  return q;
}

}  // namespace dockaug
