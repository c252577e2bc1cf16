#include "dockaug/motion_replanner.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dockaug/error.h"
#include "dockaug/random.h"

namespace dockaug {
namespace {

bool Ignored(std::span<const std::string> ignored, const std::string& id) {
  return std::find(ignored.begin(), ignored.end(), id) != ignored.end();
}

double BoundingRadius(const Shape& s) {
  return s.kind == Shape::Kind::kSphere ? s.radius : s.half_extents.norm();
}

// Distance from q to the segment [a, b] in the plane.
double PlanarSegmentDistance(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                             const Eigen::Vector2d& q) {
  const Eigen::Vector2d d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((q - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (a + t * d - q).norm();
}

bool SegmentBlocked(const Shape& shape, const Vec3& a, const Vec3& b,
                    double clearance) {
  // Cheap bounding-sphere reject before the exact test.
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  const Vec3& c = shape.pose.position();
  const double t = len2 > 0.0 ? std::clamp((c - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  if ((a + t * d - c).norm() - BoundingRadius(shape) > clearance) return false;
  return SegmentSignedDistance(shape, a, b) <= clearance;
}

bool SegmentLeavesWorkspace(const Workspace& ws, const PlanarPose& dock,
                            const Vec3& a, const Vec3& b) {
  if (ws.Margin(dock, a) <= 0.0 || ws.Margin(dock, b) <= 0.0) return true;
  // The outer radius and height limits are convex, so only the inner
  // cylinder can be entered between two admissible endpoints.
  return PlanarSegmentDistance(a.head<2>(), b.head<2>(), dock.xy()) <= ws.r_min;
}

std::optional<std::string> BlockingShape(const Vec3& a, const Vec3& b,
                                         const Scene& scene,
                                         const PlanarPose& dock,
                                         double clearance,
                                         std::span<const std::string> ignored) {
  for (const SceneObject& obj : scene.objects) {
    if (Ignored(ignored, obj.id)) continue;
    if (SegmentBlocked(obj.shape, a, b, clearance)) return obj.id;
  }
  if (SegmentLeavesWorkspace(scene.workspace, dock, a, b)) return "workspace";
  return std::nullopt;
}

std::vector<Pose> Join(std::vector<Pose> first, const std::vector<Pose>& second) {
  first.insert(first.end(), second.begin() + 1, second.end());
  return first;
}

}  // namespace

std::optional<Obstruction> FindObstruction(std::span<const Pose> waypoints,
                                           const Scene& scene,
                                           const PlanarPose& dock,
                                           double clearance,
                                           std::span<const std::string> ignored) {
  if (waypoints.empty()) return std::nullopt;
  const std::size_t n_seg = waypoints.size() == 1 ? 1 : waypoints.size() - 1;
  for (std::size_t i = 0; i < n_seg; ++i) {
    const Vec3& a = waypoints[i].position();
    const Vec3& b = waypoints[std::min(i + 1, waypoints.size() - 1)].position();
    if (auto id = BlockingShape(a, b, scene, dock, clearance, ignored)) {
      return Obstruction{i, *id};
    }
  }
  return std::nullopt;
}

std::vector<Pose> StraightLine(const Pose& start, const Pose& goal,
                               const PlannerConfig& config) {
  const double dist = (goal.position() - start.position()).norm();
  const double angle = RotationDistance(start.orientation(), goal.orientation());
  if (dist == 0.0 && angle == 0.0) return {start};
  const auto segments = static_cast<std::size_t>(std::max(
      {1.0, std::ceil(dist / config.max_step),
       std::ceil(angle / config.max_rot_step)}));
  std::vector<Pose> path;
  path.reserve(segments + 1);
  path.push_back(start);
  for (std::size_t i = 1; i < segments; ++i) {
    path.push_back(Interpolate(start, goal, static_cast<double>(i) /
                                                static_cast<double>(segments)));
  }
  path.push_back(goal);
  return path;
}

MotionPath Replan(const Pose& start, const Pose& goal, const Scene& scene,
                  const PlanarPose& dock, const PlannerConfig& config,
                  std::span<const std::string> ignored) {
  MotionPath out;
  out.ignored.assign(ignored.begin(), ignored.end());
  // Every leg is a straight segment in position, so one segment test per leg
  // decides the whole leg.
  const auto blocked = [&](const Pose& a, const Pose& b) {
    return BlockingShape(a.position(), b.position(), scene, dock,
                         config.clearance, ignored);
  };

  const std::optional<std::string> direct = blocked(start, goal);
  if (!direct) {
    out.waypoints = StraightLine(start, goal, config);
    out.tier = 0;
    return out;
  }

  if (*direct != "workspace") {
    const SceneObject* obj = scene.FindObject(*direct);
    const std::vector<Pose> line = StraightLine(start, goal, config);
    std::size_t closest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < line.size(); ++i) {
      const double d = obj->shape.SignedDistance(line[i].position());
      if (d < best) {
        best = d;
        closest = i;
      }
    }
    const Vec3& p = line[closest].position();
    const double z = std::max(p.z(), obj->shape.Top() + 2.0 * config.clearance);
    const Pose via(Vec3(p.x(), p.y(), z), line[closest].orientation());
    if (!blocked(start, via) && !blocked(via, goal)) {
      out.waypoints = Join(StraightLine(start, via, config),
                           StraightLine(via, goal, config));
      out.tier = 1;
      return out;
    }
  }

  const Workspace& ws = scene.workspace;
  const Pose base = PlanarToWorld(dock, scene.robot.base_height);
  const Quat mid = start.orientation().slerp(0.5, goal.orientation());
  Rng rng(config.seed);
  struct Candidate {
    double length;
    Pose via;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(static_cast<std::size_t>(std::max(config.max_iters, 0)));
  for (int i = 0; i < config.max_iters; ++i) {
    const double r = rng.Uniform(ws.r_min, ws.r_max);
    const double theta = rng.Uniform(-M_PI, M_PI);
    const double z = rng.Uniform(ws.z_min, ws.z_max);
    Vec3 p = base * Vec3(r * std::cos(theta), r * std::sin(theta), 0.0);
    p.z() = z;
    const Pose via(p, mid);
    const double length = (p - start.position()).norm() +
                          (goal.position() - p).norm();
    candidates.push_back({length, via});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.length < b.length;
                   });
  for (const Candidate& c : candidates) {
    if (blocked(start, c.via) || blocked(c.via, goal)) continue;
    out.waypoints = Join(StraightLine(start, c.via, config),
                         StraightLine(c.via, goal, config));
    out.tier = 2;
    return out;
  }
  throw PlanningFailure(*direct, "no collision-free path: straight line blocked by '" +
                                     *direct + "' and " +
                                     std::to_string(config.max_iters) +
                                     " via-points failed");
}

std::vector<MotionEndpoints> MotionSegmentEndpoints(
    const Demonstration& source, const ParsedTrajectory& parsed,
    const Scene& scene, const PlanarPose& dock) {
  const double h = scene.robot.base_height;
  const Pose carry = Compose(PlanarToWorld(dock, h),
                             Inverse(PlanarToWorld(source.docking, h)));
  std::vector<MotionEndpoints> out;
  for (std::size_t k = 0; k < parsed.segments.size(); ++k) {
    const Segment& seg = parsed.segments[k];
    if (seg.kind != SegmentKind::kMotion) continue;
    MotionEndpoints e;
    e.segment_index = static_cast<int>(k);
    const auto begin = static_cast<std::size_t>(seg.begin);
    const auto end = static_cast<std::size_t>(seg.end);
    if (k == 0) {
      e.start = Compose(carry, source.frames.front().state.ee_pose);
    } else {
      const DemoFrame& prev = source.frames[begin - 1];
      e.start = prev.action.target_pose;
      if (prev.action.gripper_cmd >= 0.5) {
        e.ignored.push_back(parsed.segments[k - 1].object_id);
      }
    }
    e.skill_follows = k + 1 < parsed.segments.size();
    e.goal = e.skill_follows ? source.frames[end].action.target_pose
                             : source.frames[end - 1].action.target_pose;
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<MotionPath> PlanMotionSegments(const Demonstration& source,
                                           const ParsedTrajectory& parsed,
                                           const Scene& scene,
                                           const PlanarPose& dock,
                                           const PlannerConfig& config,
                                           bool checked) {
  std::vector<MotionPath> paths;
  for (const MotionEndpoints& e :
       MotionSegmentEndpoints(source, parsed, scene, dock)) {
    MotionPath path;
    if (checked) {
      PlannerConfig c = config;
      c.seed = MixSeed(config.seed, static_cast<std::uint64_t>(e.segment_index));
      path = Replan(e.start, e.goal, scene, dock, c, e.ignored);
    } else {
      path.waypoints = StraightLine(e.start, e.goal, config);
      path.ignored = e.ignored;
      path.tier = -1;
    }
    path.segment_index = e.segment_index;
    paths.push_back(std::move(path));
  }
  return paths;
}

double PathLength(std::span<const Pose> waypoints) {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    total += (waypoints[i].position() - waypoints[i - 1].position()).norm();
  }
  return total;
}

std::vector<Pose> Retime(std::span<const Pose> waypoints, std::size_t n) {
  if (waypoints.empty()) {
    throw Error(ErrorKind::kEmptyInput, "cannot retime an empty path");
  }
  if (n < 2) throw Error(ErrorKind::kSize, "retime needs at least 2 poses");
  const std::size_t m = waypoints.size();
  std::vector<double> cum(m, 0.0);
  for (std::size_t i = 1; i < m; ++i) {
    cum[i] = cum[i - 1] +
             (waypoints[i].position() - waypoints[i - 1].position()).norm();
  }
  const bool by_index = cum.back() == 0.0;
  if (by_index) std::iota(cum.begin(), cum.end(), 0.0);
  const double total = cum.back();

  std::vector<Pose> out;
  out.reserve(n);
  out.push_back(waypoints.front());
  std::size_t seg = 0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double s = total * static_cast<double>(j) / static_cast<double>(n - 1);
    while (seg + 2 < m && cum[seg + 1] < s) ++seg;
    if (m == 1) {
      out.push_back(waypoints.front());
      continue;
    }
    const double len = cum[seg + 1] - cum[seg];
    const double u = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back(Interpolate(waypoints[seg], waypoints[seg + 1], u));
  }
  out.push_back(waypoints.back());
  return out;
}

RetimePolicy RetimePolicy::FromString(const std::string& text) {
  if (text == "match") return {Kind::kMatch, 0};
  if (text == "source") return {Kind::kSource, 0};
  if (text.rfind("fixed:", 0) == 0) {
    const std::string digits = text.substr(6);
    std::size_t n = 0;
    bool ok = !digits.empty() && digits.size() < 10 &&
              std::all_of(digits.begin(), digits.end(),
                          [](char c) { return c >= '0' && c <= '9'; });
    if (ok) n = std::stoul(digits);
    if (!ok || n < 2) {
      throw Error(ErrorKind::kConfig,
                  "retime 'fixed:<n>' needs an integer n >= 2, got '" + text + "'");
    }
    return {Kind::kFixed, n};
  }
  throw Error(ErrorKind::kConfig, "unknown retime policy '" + text +
                                      "' (expected match, source or fixed:<n>)");
}

std::string RetimePolicy::ToString() const {
  switch (kind) {
    case Kind::kMatch: return "match";
    case Kind::kSource: return "source";
    case Kind::kFixed: return "fixed:" + std::to_string(fixed);
  }
  return "match";
}

std::size_t RetimeCount(const RetimePolicy& policy, double arc_length,
                        double median_step, std::int64_t source_frames,
                        int dropped) {
  std::size_t n = 0;
  const auto from_source =
      static_cast<std::size_t>(std::max<std::int64_t>(source_frames, 0)) +
      static_cast<std::size_t>(dropped);
  switch (policy.kind) {
    case RetimePolicy::Kind::kMatch:
      n = median_step > 0.0
              ? static_cast<std::size_t>(std::ceil(arc_length / median_step)) + 1
              : from_source;
      break;
    case RetimePolicy::Kind::kSource:
      n = from_source;
      break;
    case RetimePolicy::Kind::kFixed:
      n = policy.fixed;
      break;
  }
  return std::max<std::size_t>({n, 2, static_cast<std::size_t>(dropped) + 1});
}

double MedianMotionStep(const Demonstration& source,
                        const ParsedTrajectory& parsed) {
  std::vector<double> steps;
  for (const Segment& seg : parsed.segments) {
    if (seg.kind != SegmentKind::kMotion) continue;
    for (std::int64_t t = seg.begin + 1; t < seg.end; ++t) {
      const auto i = static_cast<std::size_t>(t);
      steps.push_back((source.frames[i].action.target_pose.position() -
                       source.frames[i - 1].action.target_pose.position())
                          .norm());
    }
  }
  if (steps.empty()) return 0.0;
  const std::size_t mid = steps.size() / 2;
  std::nth_element(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(mid),
                   steps.end());
  double median = steps[mid];
  if (steps.size() % 2 == 0) {
    const double lower = *std::max_element(
        steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  return median;
}

}  // namespace dockaug
