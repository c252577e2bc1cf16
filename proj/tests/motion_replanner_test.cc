#include "dockaug/motion_replanner.h"

#include <gtest/gtest.h>

#include <numbers>

#include "dockaug/error.h"
#include "test_util.h"

namespace dockaug {
namespace {

const Quat kDown(Eigen::AngleAxisd(std::numbers::pi, Vec3::UnitY()));

Scene PlannerScene() {
  Scene s;
  s.id = "planner";
  SceneObject ball;
  ball.id = "ball";
  ball.shape = Shape::Sphere(Vec3(0.6, 0.0, 0.6), 0.1);
  s.objects.push_back(ball);
  s.workspace = {0.3, 0.95, 0.3, 1.1};
  s.crop = Aabb(Vec3::Constant(-5), Vec3::Constant(5));
  return s;
}

// Dense oracle: every waypoint segment is sampled 10x finer than the planner
// resolution and checked against the inflated shapes and the annulus.
void ExpectPathClear(const std::vector<Pose>& w, const Scene& scene, const PlanarPose& dock,
                     double clearance) {
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    for (int k = 0; k <= 10; ++k) {
      const Vec3 p = w[i].position() + (w[i + 1].position() - w[i].position()) * (k / 10.0);
      for (const SceneObject& o : scene.objects) {
        EXPECT_GT(o.shape.SignedDistance(p), clearance) << "waypoint " << i;
      }
      EXPECT_GT(scene.workspace.Margin(dock, p), 0.0) << "waypoint " << i;
    }
  }
}

TEST(StraightLine, StepCountAndEndpoints) {
  PlannerConfig cfg;
  const Pose a(Vec3(0.5, 0.2, 0.6), kDown);
  const Pose b(Vec3(0.5, -0.2, 0.7), Quat(Eigen::AngleAxisd(0.3, Vec3::UnitZ())) * kDown);
  const std::vector<Pose> w = StraightLine(a, b, cfg);
  const double d = (b.position() - a.position()).norm();
  const double ang = RotationDistance(a.orientation(), b.orientation());
  const auto n = static_cast<std::size_t>(
      std::ceil(std::max(d / cfg.max_step, ang / cfg.max_rot_step)));
  ASSERT_EQ(w.size(), n + 1);
  EXPECT_TRUE(w.front() == a);
  EXPECT_TRUE(w.back() == b);
  for (std::size_t i = 1; i < w.size(); ++i) {
    EXPECT_LE((w[i].position() - w[i - 1].position()).norm(), cfg.max_step + 1e-12);
    EXPECT_LE(RotationDistance(w[i].orientation(), w[i - 1].orientation()),
              cfg.max_rot_step + 1e-9);
  }
  EXPECT_EQ(StraightLine(a, a, cfg).size(), 1u);
}

TEST(Replan, FreeSpaceIsStraight) {
  const Scene s = PlannerScene();
  const MotionPath p = Replan(Pose(Vec3(0.5, 0.4, 0.5), kDown), Pose(Vec3(0.5, 0.3, 0.9), kDown),
                              s, PlanarPose(0, 0, 0), {});
  EXPECT_EQ(p.tier, 0);
}

TEST(Replan, DetoursAroundBlockingSphere) {
  const Scene s = PlannerScene();
  const PlanarPose dock(0, 0, 0);
  PlannerConfig cfg;
  const Pose a(Vec3(0.6, 0.3, 0.6), kDown), b(Vec3(0.6, -0.3, 0.6), kDown);
  ASSERT_TRUE(FindObstruction(StraightLine(a, b, cfg), s, dock, cfg.clearance, {}));
  const MotionPath p = Replan(a, b, s, dock, cfg);
  EXPECT_GT(p.tier, 0);
  EXPECT_TRUE(p.waypoints.front() == a);
  EXPECT_TRUE(p.waypoints.back() == b);
  ExpectPathClear(p.waypoints, s, dock, cfg.clearance);
  EXPECT_FALSE(FindObstruction(p.waypoints, s, dock, cfg.clearance, {}));
}

TEST(Replan, DeterministicForSeed) {
  Scene s = PlannerScene();
  // A tall box defeats the lifted via-point, forcing the sampled tier.
  s.objects[0].shape = Shape::Box(Pose(Vec3(0.6, 0, 0.7), Quat::Identity()),
                                  Vec3(0.05, 0.05, 0.6));
  const PlanarPose dock(0, 0, 0);
  PlannerConfig cfg;
  cfg.seed = 9;
  const Pose a(Vec3(0.6, 0.3, 0.6), kDown), b(Vec3(0.6, -0.3, 0.6), kDown);
  const MotionPath p1 = Replan(a, b, s, dock, cfg);
  const MotionPath p2 = Replan(a, b, s, dock, cfg);
  EXPECT_EQ(p1.tier, 2);
  ASSERT_EQ(p1.waypoints.size(), p2.waypoints.size());
  for (std::size_t i = 0; i < p1.waypoints.size(); ++i) {
    EXPECT_TRUE(p1.waypoints[i] == p2.waypoints[i]);
  }
  ExpectPathClear(p1.waypoints, s, dock, cfg.clearance);
}

TEST(Replan, IgnoredObjectIsNotAnObstacle) {
  const Scene s = PlannerScene();
  const Pose a(Vec3(0.6, 0.3, 0.6), kDown), b(Vec3(0.6, -0.3, 0.6), kDown);
  const std::vector<std::string> ignored = {"ball"};
  EXPECT_EQ(Replan(a, b, s, PlanarPose(0, 0, 0), {}, ignored).tier, 0);
}

TEST(Replan, UnreachableGoalNamesBlockingShape) {
  const Scene s = PlannerScene();
  const Pose a(Vec3(0.6, 0.3, 0.6), kDown), inside(Vec3(0.6, 0.0, 0.6), kDown);
  try {
    Replan(a, inside, s, PlanarPose(0, 0, 0), {});
    FAIL() << "expected a planning failure";
  } catch (const PlanningFailure& e) {
    EXPECT_EQ(e.shape_id(), "ball");
    EXPECT_EQ(e.kind(), ErrorKind::kPlanning);
  }
  const Pose far(Vec3(2.0, 0.0, 0.6), kDown);
  try {
    Replan(a, far, s, PlanarPose(0, 0, 0), {});
    FAIL() << "expected a planning failure";
  } catch (const PlanningFailure& e) {
    EXPECT_EQ(e.shape_id(), "workspace");
  }
}

TEST(Replan, InnerCylinderCountsAsLeavingWorkspace) {
  const Scene s = PlannerScene();
  PlannerConfig cfg;
  const Pose a(Vec3(0.5, 0.3, 0.6), kDown), b(Vec3(-0.5, 0.0, 0.6), kDown);
  const auto ob = FindObstruction(StraightLine(a, b, cfg), s, PlanarPose(0, 0, 0),
                                  cfg.clearance, {});
  ASSERT_TRUE(ob);
  EXPECT_EQ(ob->shape_id, "workspace");
}

TEST(Retime, ArcLengthUniformWithExactEndpoints) {
  std::vector<Pose> poly = {Pose(Vec3(0, 0, 0), kDown), Pose(Vec3(1, 0, 0), kDown),
                            Pose(Vec3(1, 2, 0), kDown)};
  const std::vector<Pose> r = Retime(poly, 7);
  ASSERT_EQ(r.size(), 7u);
  EXPECT_TRUE(r.front() == poly.front());
  EXPECT_TRUE(r.back() == poly.back());
  // Independent oracle: the point at arc length s along the polyline.
  const auto at = [](double s) {
    return s <= 1.0 ? Vec3(s, 0, 0) : Vec3(1, s - 1.0, 0);
  };
  for (int i = 0; i < 7; ++i) {
    EXPECT_LT((r[static_cast<std::size_t>(i)].position() - at(3.0 * i / 6.0)).norm(), 1e-12);
  }
  EXPECT_NEAR(PathLength(poly), 3.0, 1e-15);
}

TEST(Retime, ZeroLengthPathUsesIndex) {
  const Pose p(Vec3(1, 1, 1), kDown);
  const std::vector<Pose> r = Retime(std::vector<Pose>{p, p}, 4);
  ASSERT_EQ(r.size(), 4u);
  for (const Pose& q : r) EXPECT_TRUE(q == p);
}

TEST(RetimeCount, Policies) {
  const RetimePolicy match = RetimePolicy::FromString("match");
  EXPECT_EQ(RetimeCount(match, 0.1, 0.01, 30, 2), 11u);
  EXPECT_EQ(RetimeCount(match, 0.105, 0.01, 30, 2), 12u);
  EXPECT_EQ(RetimeCount(match, 0.0, 0.0, 30, 2), 32u);
  EXPECT_EQ(RetimeCount(RetimePolicy::FromString("source"), 0.5, 0.01, 30, 1), 31u);
  EXPECT_EQ(RetimeCount(RetimePolicy::FromString("fixed:5"), 0.5, 0.01, 30, 1), 5u);
  EXPECT_EQ(RetimeCount(RetimePolicy::FromString("fixed:2"), 0.5, 0.01, 30, 2), 3u);
  EXPECT_EQ(RetimePolicy::FromString("fixed:12").ToString(), "fixed:12");
  EXPECT_THROW(RetimePolicy::FromString("fixed:"), Error);
  EXPECT_THROW(RetimePolicy::FromString("fast"), Error);
}

TEST(MedianMotionStep, SourceOracle) {
  const testing::HarnessSource h = testing::MakeHarnessSource(false, 2);
  std::vector<double> steps;
  for (const Segment& s : h.parsed.segments) {
    if (s.kind != SegmentKind::kMotion) continue;
    for (std::int64_t t = s.begin + 1; t < s.end; ++t) {
      steps.push_back((h.demo().frames[t].action.target_pose.position() -
                       h.demo().frames[t - 1].action.target_pose.position())
                          .norm());
    }
  }
  std::sort(steps.begin(), steps.end());
  const double median = steps.size() % 2 == 1
                            ? steps[steps.size() / 2]
                            : 0.5 * (steps[steps.size() / 2 - 1] + steps[steps.size() / 2]);
  EXPECT_DOUBLE_EQ(MedianMotionStep(h.demo(), h.parsed), median);
}

TEST(MotionEndpoints, SourceDockReproducesSourceSplices) {
  const testing::HarnessSource h = testing::MakeHarnessSource(true, 3);
  const auto ends = MotionSegmentEndpoints(h.demo(), h.parsed, h.scene(),
                                           h.demo().docking);
  ASSERT_EQ(ends.size(), 2u);
  EXPECT_TRUE(ends[0].start == h.demo().frames[0].state.ee_pose);
  const Segment& s0 = h.parsed.segments[0];
  EXPECT_TRUE(ends[0].goal == h.demo().frames[s0.end].action.target_pose);
  EXPECT_TRUE(ends[0].ignored.empty());
  const Segment& s2 = h.parsed.segments[2];
  EXPECT_TRUE(ends[1].start == h.demo().frames[s2.begin - 1].action.target_pose);
  ASSERT_EQ(ends[1].ignored.size(), 1u);
  EXPECT_EQ(ends[1].ignored[0], "cube");
}

}  // namespace
}  // namespace dockaug
