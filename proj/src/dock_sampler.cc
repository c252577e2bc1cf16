#include "dockaug/dock_sampler.h"

#include <cmath>
#include <limits>

#include "dockaug/random.h"

namespace dockaug {

void SamplerConfig::Validate() const {
  if (n_docks < 1) throw Error(ErrorKind::kConfig, "n_docks must be >= 1");
  if (!(range_lo > 0.0) || !(range_lo <= range_hi)) {
    throw Error(ErrorKind::kConfig, "range must satisfy 0 < lo <= hi");
  }
  if (!(yaw_jitter >= 0.0)) {
    throw Error(ErrorKind::kConfig, "yaw_jitter must be >= 0");
  }
  if (max_attempts < 1) throw Error(ErrorKind::kConfig, "max_attempts must be >= 1");
  if (!(min_visible_fraction >= 0.0 && min_visible_fraction <= 1.0)) {
    throw Error(ErrorKind::kConfig, "min_visible_fraction must be in [0, 1]");
  }
  if (!(planner.max_step > 0.0) || !(planner.max_rot_step > 0.0) ||
      !(planner.clearance >= 0.0)) {
    throw Error(ErrorKind::kConfig, "planner steps must be positive");
  }
}

VisibilityResult CheckVisibility(const Scene& scene, const PlanarPose& dock,
                                 const std::string& target_id,
                                 double min_fraction) {
  const SceneObject* target = scene.FindObject(target_id);
  if (target == nullptr) {
    throw Error(ErrorKind::kInvariant, "visibility target '" + target_id +
                                           "' is not in scene '" + scene.id + "'");
  }
  std::vector<const Shape*> occluders;
  for (const SceneObject& obj : scene.objects) {
    if (obj.id != target_id) occluders.push_back(&obj.shape);
  }
  const Shape body = scene.robot.BodyAt(dock);
  occluders.push_back(&body);

  constexpr double kEps = 1e-9;
  const Vec3& eye = scene.camera.pose.position();
  VisibilityResult out;
  out.total = static_cast<int>(target->points.size());
  for (const Vec3& p : target->points) {
    if (!scene.camera.InFrustum(p)) continue;
    bool hidden = false;
    for (const Shape* s : occluders) {
      const std::optional<double> t = SegmentFirstHit(*s, eye, p);
      if (t && *t < 1.0 - kEps) {
        hidden = true;
        break;
      }
    }
    if (!hidden) ++out.visible;
  }
  out.fraction = out.total > 0 ? static_cast<double>(out.visible) / out.total : 0.0;
  out.pass = out.total > 0 && out.fraction >= min_fraction;
  return out;
}

ReachabilityResult CheckReachability(const Scene& scene, const PlanarPose& dock,
                                     const ParsedTrajectory& parsed,
                                     const Demonstration& demo) {
  ReachabilityResult out;
  out.margin = std::numeric_limits<double>::infinity();
  for (const Segment& seg : parsed.segments) {
    if (seg.kind != SegmentKind::kSkill) continue;
    for (std::int64_t t = seg.begin; t < seg.end; ++t) {
      const Vec3& p =
          demo.frames[static_cast<std::size_t>(t)].action.target_pose.position();
      const double m = scene.workspace.Margin(dock, p);
      if (m < out.margin) {
        out.margin = m;
        out.worst_frame = t;
      }
    }
  }
  out.pass = out.worst_frame >= 0 && out.margin > 0.0;
  return out;
}

CollisionResult CheckCollisionFree(const Scene& scene, const PlanarPose& dock,
                                   const std::vector<MotionPath>& paths,
                                   double clearance) {
  CollisionResult out;
  out.base_clear = true;
  for (const Polygon2& poly : scene.floorplan) {
    if (DiskIntersectsPolygon(dock.xy(), scene.robot.footprint_radius, poly)) {
      out.base_clear = false;
      out.failing_shape = "floorplan";
      break;
    }
  }
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::optional<Obstruction> hit = FindObstruction(
        paths[i].waypoints, scene, dock, clearance, paths[i].ignored);
    if (hit) {
      out.failing_index = static_cast<int>(i);
      if (out.base_clear) out.failing_shape = hit->shape_id;
      break;
    }
  }
  out.pass = out.base_clear && out.failing_index < 0;
  return out;
}

FeasibilityReport EvaluateDock(const Scene& scene, const Demonstration& source,
                               const ParsedTrajectory& parsed,
                               const PlanarPose& dock,
                               const SamplerConfig& config) {
  FeasibilityReport r;
  r.dock = dock;
  r.visibility = CheckVisibility(scene, dock, parsed.TargetObject().id,
                                 config.min_visible_fraction);
  r.reachability = CheckReachability(scene, dock, parsed, source);
  std::vector<MotionPath> paths;
  std::optional<PlanningFailure> failure;
  int failed_index = -1;
  const std::vector<MotionEndpoints> ends =
      MotionSegmentEndpoints(source, parsed, scene, dock);
  for (std::size_t i = 0; i < ends.size(); ++i) {
    PlannerConfig c = config.planner;
    c.seed = MixSeed(c.seed, static_cast<std::uint64_t>(ends[i].segment_index));
    try {
      paths.push_back(Replan(ends[i].start, ends[i].goal, scene, dock, c,
                             ends[i].ignored));
      paths.back().segment_index = ends[i].segment_index;
    } catch (const PlanningFailure& e) {
      failure = e;
      failed_index = static_cast<int>(i);
      break;
    }
  }
  r.collision_free =
      CheckCollisionFree(scene, dock, paths, config.planner.clearance);
  if (failure) {
    r.collision_free.pass = false;
    r.collision_free.failing_index = failed_index;
    if (r.collision_free.base_clear) {
      r.collision_free.failing_shape = failure->shape_id();
    }
  }
  r.accepted = r.visibility.pass && r.reachability.pass && r.collision_free.pass;
  return r;
}

std::vector<PlanarPose> CandidateDocks(const Demonstration& source,
                                       const ParsedTrajectory& parsed,
                                       const SamplerConfig& config, int count) {
  const Vec3& c = parsed.TargetObject().centroid;
  const Eigen::Vector2d rel = source.docking.xy() - c.head<2>();
  const double d_src = rel.norm();
  const double phi_src = std::atan2(rel.y(), rel.x());
  const double heading_offset =
      NormalizeAngle(source.docking.yaw() - NormalizeAngle(phi_src + M_PI));
  Rng rng(config.seed);
  std::vector<PlanarPose> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) {
    const double r = d_src * rng.Uniform(config.range_lo, config.range_hi);
    const double phi = phi_src + rng.Uniform(-config.yaw_jitter, config.yaw_jitter);
    const double dyaw = rng.Uniform(-config.yaw_jitter, config.yaw_jitter);
    const double x = c.x() + r * std::cos(phi);
    const double y = c.y() + r * std::sin(phi);
    const double facing = std::atan2(c.y() - y, c.x() - x);
    out.emplace_back(x, y, facing + heading_offset + dyaw);
  }
  return out;
}

SampleResult SampleDocks(const Scene& scene, const Demonstration& source,
                         const ParsedTrajectory& parsed,
                         const SamplerConfig& config) {
  config.Validate();
  SampleResult out;
  out.histogram = {{"visibility", 0}, {"reachability", 0}, {"collision", 0}};
  const std::vector<PlanarPose> candidates =
      CandidateDocks(source, parsed, config, config.max_attempts);
  for (int i = 0; i < config.max_attempts; ++i) {
    FeasibilityReport r = EvaluateDock(scene, source, parsed,
                                       candidates[static_cast<std::size_t>(i)],
                                       config);
    r.attempt = i;
    out.attempts = i + 1;
    if (!r.visibility.pass) ++out.histogram["visibility"];
    if (!r.reachability.pass) ++out.histogram["reachability"];
    if (!r.collision_free.pass) ++out.histogram["collision"];
    if (r.accepted) {
      out.accepted.push_back(r);
      if (static_cast<int>(out.accepted.size()) == config.n_docks) return out;
    } else {
      out.rejected.push_back(r);
    }
  }
  std::string msg = "dock sampling exhausted after " +
                    std::to_string(out.attempts) + " attempts with " +
                    std::to_string(out.accepted.size()) + "/" +
                    std::to_string(config.n_docks) + " accepted; rejections:";
  for (const auto& [k, v] : out.histogram) msg += " " + k + "=" + std::to_string(v);
  throw ExhaustionError(out.attempts, out.histogram, msg);
}

}  // namespace dockaug
