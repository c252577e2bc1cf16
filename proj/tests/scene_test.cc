#include "dockaug/scene.h"

#include <gtest/gtest.h>

#include <numbers>

#include "dockaug/error.h"
#include "dockaug/sim_harness.h"
#include "test_util.h"

namespace dockaug {
namespace {

// Dense-sampling oracle for the segment distance.
double SampledSegmentDistance(const Shape& s, const Vec3& a, const Vec3& b, int n) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    best = std::min(best, s.SignedDistance(a + (b - a) * (static_cast<double>(i) / n)));
  }
  return best;
}

TEST(Shape, SphereSignedDistance) {
  const Shape s = Shape::Sphere(Vec3(1, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(s.SignedDistance(Vec3(1, 0, 0)), -0.5);
  EXPECT_DOUBLE_EQ(s.SignedDistance(Vec3(3, 0, 0)), 1.5);
  EXPECT_DOUBLE_EQ(s.Top(), 0.5);
}

TEST(Shape, RotatedBoxSignedDistance) {
  const Pose pose(Vec3(0, 0, 1), Quat(Eigen::AngleAxisd(std::numbers::pi / 4, Vec3::UnitZ())));
  const Shape b = Shape::Box(pose, Vec3(1, 0.5, 0.25));
  EXPECT_NEAR(b.SignedDistance(Vec3(0, 0, 1)), -0.25, 1e-12);
  EXPECT_NEAR(b.SignedDistance(Vec3(0, 0, 2)), 0.75, 1e-12);
  // Corner region: distance to the nearest corner.
  const Vec3 corner = pose * Vec3(1, 0.5, 0.25);
  const Vec3 p = pose * Vec3(1.3, 0.9, 0.25);
  EXPECT_NEAR(b.SignedDistance(p), (p - corner).norm(), 1e-12);
  EXPECT_NEAR(b.Top(), 1.25, 1e-12);
}

TEST(Shape, SegmentDistanceAgreesWithDenseSampling) {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const Shape s = i % 2 == 0
                        ? Shape::Sphere(Vec3(rng.Uniform(-1, 1), rng.Uniform(-1, 1), 0), 0.3)
                        : Shape::Box(testing::RandomPose(rng, 0.5), Vec3(0.3, 0.2, 0.1));
    const Vec3 a(rng.Uniform(-2, 2), rng.Uniform(-2, 2), rng.Uniform(-1, 1));
    const Vec3 b(rng.Uniform(-2, 2), rng.Uniform(-2, 2), rng.Uniform(-1, 1));
    const double exact = SegmentSignedDistance(s, a, b);
    const double sampled = SampledSegmentDistance(s, a, b, 4000);
    EXPECT_LE(exact, sampled + 1e-9);
    EXPECT_NEAR(exact, sampled, 2e-3);
  }
}

TEST(Shape, FirstHitIsOnTheSurface) {
  const Shape s = Shape::Sphere(Vec3::Zero(), 1.0);
  const auto t = SegmentFirstHit(s, Vec3(-3, 0, 0), Vec3(3, 0, 0));
  ASSERT_TRUE(t.has_value());
  EXPECT_NEAR(*t, 1.0 / 3.0, 1e-9);
  EXPECT_FALSE(SegmentFirstHit(s, Vec3(-3, 2, 0), Vec3(3, 2, 0)).has_value());
}

TEST(Workspace, MarginSigns) {
  const Workspace ws{0.3, 0.9, 0.3, 1.1};
  const PlanarPose dock(1, 0, 0);
  EXPECT_NEAR(ws.Margin(dock, Vec3(1.6, 0, 0.7)), 0.3, 1e-12);
  EXPECT_LT(ws.Margin(dock, Vec3(1.1, 0, 0.7)), 0.0);
  EXPECT_LT(ws.Margin(dock, Vec3(2.0, 0, 0.7)), 0.0);
  EXPECT_NEAR(ws.Margin(dock, Vec3(2.0, 0, 1.5)), -std::hypot(0.1, 0.4), 1e-12);
}

TEST(Camera, FrustumLimits) {
  Camera c;
  c.hfov = std::numbers::pi / 2;
  c.vfov = std::numbers::pi / 2;
  EXPECT_TRUE(c.InFrustum(Vec3(0, 0, 1)));
  EXPECT_TRUE(c.InFrustum(Vec3(0.99, 0, 1)));
  EXPECT_FALSE(c.InFrustum(Vec3(1.01, 0, 1)));
  EXPECT_FALSE(c.InFrustum(Vec3(0, 0, -1)));
}

TEST(Floorplan, DiskPolygonTouchDoesNotCount) {
  const Polygon2 square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_TRUE(DiskIntersectsPolygon({0.5, 0.5}, 0.1, square));
  EXPECT_TRUE(DiskIntersectsPolygon({1.2, 0.5}, 0.3, square));
  EXPECT_FALSE(DiskIntersectsPolygon({1.5, 0.5}, 0.5, square));
  EXPECT_FALSE(DiskIntersectsPolygon({3, 3}, 0.5, square));
}

TEST(SceneJson, HarnessScenesRoundTrip) {
  for (const HarnessCase& hc : {MakePickScene(3), MakePlaceScene(4)}) {
    const std::string text = SceneToJson(hc.scene);
    const Scene back = SceneFromJson(text);
    EXPECT_EQ(SceneToJson(back), text);
    EXPECT_EQ(back.objects.size(), hc.scene.objects.size());
    EXPECT_EQ(back.background, hc.scene.background);
  }
}

TEST(SceneJson, RejectsMalformedInput) {
  EXPECT_THROW(SceneFromJson("{"), Error);
  EXPECT_THROW(SceneFromJson("{}"), Error);
}

TEST(Scene, ValidateRejectsEmptyAnnulus) {
  Scene s = MakePickScene(0).scene;
  s.workspace.r_min = s.workspace.r_max;
  EXPECT_THROW(ValidateScene(s), Error);
}

}  // namespace
}  // namespace dockaug
