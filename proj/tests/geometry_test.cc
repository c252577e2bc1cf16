#include "dockaug/geometry.h"

#include <gtest/gtest.h>

#include <numbers>

#include "test_util.h"

namespace dockaug {
namespace {

using testing::HomogeneousMatrix;
using testing::MaxAbsDiff;
using testing::RandomPose;

constexpr double kTol = 1e-12;

TEST(Geometry, ComposeMatchesMatrixProduct) {
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const Pose a = RandomPose(rng), b = RandomPose(rng);
    EXPECT_LT(MaxAbsDiff(HomogeneousMatrix(Compose(a, b)),
                         HomogeneousMatrix(a) * HomogeneousMatrix(b)),
              kTol);
  }
}

TEST(Geometry, InverseMatchesMatrixInverse) {
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    const Pose a = RandomPose(rng);
    EXPECT_LT(MaxAbsDiff(HomogeneousMatrix(Inverse(a)), HomogeneousMatrix(a).inverse()),
              1e-11);
  }
}

TEST(Geometry, ComposeIsAssociative) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Pose a = RandomPose(rng), b = RandomPose(rng), c = RandomPose(rng);
    EXPECT_LT(MaxAbsDiff(HomogeneousMatrix(Compose(Compose(a, b), c)),
                         HomogeneousMatrix(Compose(a, Compose(b, c)))),
              kTol);
  }
}

TEST(Geometry, RelativeTransformRecoversDestination) {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const Pose src = RandomPose(rng), dst = RandomPose(rng);
    const Pose back = Compose(src, RelativeTransform(src, dst).delta());
    EXPECT_LT(MaxAbsDiff(HomogeneousMatrix(back), HomogeneousMatrix(dst)), 1e-11);
  }
}

TEST(Geometry, RelativeTransformOfEqualPosesIsExactIdentity) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Pose p = RandomPose(rng);
    EXPECT_TRUE(RelativeTransform(p, p).delta() == Pose::Identity());
    EXPECT_TRUE(RelativeTransform(p, p).IsIdentity(0.0));
  }
}

TEST(Geometry, TransformPointsMatchesConjugatedMatrix) {
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    const Pose anchor = RandomPose(rng), delta = RandomPose(rng, 0.2);
    std::vector<Vec3> pts;
    for (int k = 0; k < 20; ++k) pts.push_back(RandomPose(rng).position());
    const std::vector<Vec3> out = TransformPoints(pts, RigidTransform(delta), anchor);
    const Eigen::Matrix4d m = HomogeneousMatrix(anchor) * HomogeneousMatrix(delta) *
                              HomogeneousMatrix(anchor).inverse();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const Eigen::Vector4d h = m * pts[k].homogeneous();
      EXPECT_LT((out[k] - h.head<3>()).norm(), 1e-11);
    }
  }
}

TEST(Geometry, TransformPreservesPairwiseDistances) {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    std::vector<Vec3> pts;
    for (int k = 0; k < 30; ++k) pts.push_back(RandomPose(rng).position());
    const std::vector<Vec3> out =
        TransformPoints(pts, RigidTransform(RandomPose(rng)), RandomPose(rng));
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        const double d0 = (pts[a] - pts[b]).norm();
        EXPECT_LE(std::abs((out[a] - out[b]).norm() - d0), 1e-6 * d0);
      }
    }
  }
}

TEST(Geometry, IdentityTransformLeavesPointsBitEqual) {
  Rng rng(8);
  std::vector<Vec3> pts;
  for (int k = 0; k < 30; ++k) pts.push_back(RandomPose(rng).position());
  const std::vector<Vec3> out = TransformPoints(pts, RigidTransform(), RandomPose(rng));
  EXPECT_EQ(out, pts);
}

TEST(Geometry, PoseNormalizesQuaternion) {
  const Pose p(Vec3::Zero(), Quat(2.0, 0.0, 0.0, 0.0));
  EXPECT_DOUBLE_EQ(p.orientation().norm(), 1.0);
}

TEST(Geometry, PlanarRoundTrip) {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const PlanarPose p(rng.Uniform(-3, 3), rng.Uniform(-3, 3), rng.Uniform(-3.1, 3.1));
    const PlanarPose q = WorldToPlanar(PlanarToWorld(p, 0.4));
    EXPECT_NEAR(q.x(), p.x(), kTol);
    EXPECT_NEAR(q.y(), p.y(), kTol);
    EXPECT_NEAR(q.yaw(), p.yaw(), 1e-12);
  }
}

TEST(Geometry, NormalizeAngleRange) {
  EXPECT_DOUBLE_EQ(NormalizeAngle(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(NormalizeAngle(3 * std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(NormalizeAngle(0.5 + 4 * std::numbers::pi), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(PlanarPose(0, 0, -std::numbers::pi).yaw(), std::numbers::pi);
}

TEST(Geometry, RotationDistanceIgnoresSign) {
  Rng rng(10);
  for (int i = 0; i < 100; ++i) {
    const Quat a = RandomPose(rng).orientation();
    const Quat neg(-a.w(), -a.x(), -a.y(), -a.z());
    EXPECT_NEAR(RotationDistance(a, neg), 0.0, 1e-7);
  }
  const Quat z90(Eigen::AngleAxisd(std::numbers::pi / 2, Vec3::UnitZ()));
  EXPECT_NEAR(RotationDistance(Quat::Identity(), z90), std::numbers::pi / 2, 1e-12);
}

TEST(Geometry, InterpolateEndpointsAndMidpoint) {
  const Pose a(Vec3(0, 0, 0), Quat::Identity());
  const Pose b(Vec3(1, 2, 3), Quat(Eigen::AngleAxisd(1.0, Vec3::UnitZ())));
  EXPECT_LT(MaxAbsDiff(HomogeneousMatrix(Interpolate(a, b, 0.0)), HomogeneousMatrix(a)),
            kTol);
  EXPECT_LT(MaxAbsDiff(HomogeneousMatrix(Interpolate(a, b, 1.0)), HomogeneousMatrix(b)),
            kTol);
  const Pose m = Interpolate(a, b, 0.5);
  EXPECT_LT((m.position() - Vec3(0.5, 1, 1.5)).norm(), kTol);
  EXPECT_NEAR(RotationDistance(m.orientation(), a.orientation()), 0.5, 1e-12);
}

TEST(Geometry, CanonicalQuatHasNonNegativeW) {
  const Quat q = CanonicalQuat(Quat(-0.5, 0.5, 0.5, 0.5));
  EXPECT_GE(q.w(), 0.0);
  EXPECT_DOUBLE_EQ(q.x(), -0.5);
}

}  // namespace
}  // namespace dockaug
