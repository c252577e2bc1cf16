#include "dockaug/sim_harness.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dockaug/dock_sampler.h"
#include "dockaug/error.h"
#include "dockaug/pointcloud_ops.h"
#include "dockaug/random.h"

namespace dockaug {
namespace {

constexpr double kTableHeight = 0.4;
Vec3 TableHalf() { return Vec3(0.35, 0.45, 0.2); }
constexpr double kCubeHalf = 0.035;
constexpr double kRestGap = 0.001;
constexpr double kSourceDistance = 0.7;
constexpr int kObjectPoints = 64;

// Points uniformly distributed over the surface of a box shape.
std::vector<Vec3> BoxSurfacePoints(const Shape& box, int count, Rng& rng) {
  const Vec3& h = box.half_extents;
  const double areas[3] = {h.y() * h.z(), h.x() * h.z(), h.x() * h.y()};
  const double total = areas[0] + areas[1] + areas[2];
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double pick = rng.Uniform() * total;
    const int axis = pick < areas[0] ? 0 : (pick < areas[0] + areas[1] ? 1 : 2);
    const double sign = rng.Uniform() < 0.5 ? -1.0 : 1.0;
    Vec3 local;
    for (int a = 0; a < 3; ++a) local[a] = rng.Uniform(-h[a], h[a]);
    local[axis] = sign * h[axis];
    out.push_back(box.pose * local);
  }
  return out;
}

std::vector<Vec3> SphereSurfacePoints(const Shape& sphere, int count, Rng& rng) {
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double z = rng.Uniform(-1.0, 1.0);
    const double phi = rng.Uniform(-M_PI, M_PI);
    const double s = std::sqrt(1.0 - z * z);
    out.push_back(sphere.pose.position() +
                  sphere.radius * Vec3(s * std::cos(phi), s * std::sin(phi), z));
  }
  return out;
}

Pose LookAt(const Vec3& eye, const Vec3& target) {
  const Vec3 z = (target - eye).normalized();
  const Vec3 x = z.cross(Vec3::UnitZ()).normalized();
  const Vec3 y = z.cross(x);
  Eigen::Matrix3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Pose(eye, Quat(r));
}

struct Layout {
  Vec3 cube;
  std::optional<Vec3> bin;
};

HarnessCase BuildScene(std::uint64_t seed, const HarnessOptions& options,
                       bool with_bin) {
  Rng rng(MixSeed(seed, 0));
  Layout layout;
  const double cx = rng.Uniform(-0.2, -0.1);
  const double cy = rng.Uniform(-0.1, 0.1);
  layout.cube = Vec3(cx, cy, kTableHeight + kRestGap + kCubeHalf);
  if (with_bin) layout.bin = Vec3(cx, cy + 0.25, kTableHeight + 0.02);

  HarnessCase hc;
  Scene& s = hc.scene;
  s.id = std::string(with_bin ? "place_" : "pick_") + std::to_string(seed);

  SceneObject table;
  table.id = "table";
  table.shape = Shape::Box(Pose::Translation(0.0, 0.0, 0.5 * kTableHeight),
                           TableHalf());
  s.objects.push_back(table);

  // A hanging lamp on the robot side of the table, off the source approach.
  const double lamp_angle = M_PI - 0.3;
  SceneObject lamp;
  lamp.id = "lamp";
  lamp.shape = Shape::Sphere(Vec3(cx + 0.4 * std::cos(lamp_angle),
                                  cy + 0.4 * std::sin(lamp_angle), 0.62),
                             0.045);
  s.objects.push_back(lamp);

  Rng cube_rng(MixSeed(seed, 1));
  SceneObject cube;
  cube.id = "cube";
  cube.shape = Shape::Box(Pose(layout.cube, Quat::Identity()),
                          Vec3::Constant(kCubeHalf));
  cube.label = Label::Object(Label::kFirstObjectCode);
  cube.points = BoxSurfacePoints(cube.shape, kObjectPoints, cube_rng);
  cube.movable = true;
  s.objects.push_back(cube);

  if (layout.bin) {
    Rng bin_rng(MixSeed(seed, 2));
    SceneObject bin;
    bin.id = "bin";
    bin.shape = Shape::Box(Pose(*layout.bin, Quat::Identity()),
                           Vec3(0.07, 0.07, 0.02));
    bin.label = Label::Object(Label::kFirstObjectCode + 1);
    bin.points = BoxSurfacePoints(bin.shape, kObjectPoints, bin_rng);
    s.objects.push_back(bin);
    s.task = PlaceInto{"cube", Aabb(Vec3(layout.bin->x() - 0.07,
                                         layout.bin->y() - 0.07, 0.40),
                                    Vec3(layout.bin->x() + 0.07,
                                         layout.bin->y() + 0.07, 0.55))};
  } else {
    s.task = PickLift{"cube", 0.05};
  }

  int n_background = options.background_points;
  if (n_background <= 0) {
    const int templates = static_cast<int>(GripperTemplate().size()) +
                          kObjectPoints * (with_bin ? 2 : 1);
    n_background = std::max(options.point_count - templates + 96, 64);
  }
  Rng bg_rng(MixSeed(seed, 3));
  const int lamp_points = std::min(24, n_background / 8);
  const Vec3 half = TableHalf();
  for (int i = 0; i < n_background - lamp_points; ++i) {
    s.background.emplace_back(bg_rng.Uniform(-half.x(), half.x()),
                              bg_rng.Uniform(-half.y(), half.y()), kTableHeight);
  }
  for (const Vec3& p : SphereSurfacePoints(lamp.shape, lamp_points, bg_rng)) {
    s.background.push_back(p);
  }

  s.camera.pose = LookAt(Vec3(0.9, 0.7, 1.3), layout.cube);
  s.camera.hfov = 1.2;
  s.camera.vfov = 0.9;
  s.workspace = Workspace{0.3, 0.95, 0.3, 1.1};
  s.floorplan.push_back({{-half.x(), -half.y()},
                         {half.x(), -half.y()},
                         {half.x(), half.y()},
                         {-half.x(), half.y()}});
  s.robot.footprint_radius = 0.22;
  s.robot.body_half_extents = Eigen::Vector2d(0.2, 0.2);
  s.robot.body_height = 1.1;
  s.robot.base_height = 0.0;
  s.robot.home = Pose(Vec3(0.35, 0.0, 0.65),
                      Quat(Eigen::AngleAxisd(M_PI, Vec3::UnitY())));
  s.crop = Aabb(Vec3(-0.9, -0.8, 0.39), Vec3(0.6, 0.8, 1.2));
  s.grasp_radius = 0.05;
  ValidateScene(s);

  hc.source_dock = PlanarPose(cx - kSourceDistance, cy, 0.0);
  return hc;
}

}  // namespace

const std::vector<Vec3>& GripperTemplate() {
  static const std::vector<Vec3> points = [] {
    // Palm above the tool point, two fingers reaching 2 cm past it. The
    // frame's +z is the approach direction.
    Rng rng(0x67726970ULL);
    std::vector<Vec3> pts;
    pts.reserve(128);
    for (int i = 0; i < 48; ++i) {
      pts.emplace_back(rng.Uniform(-0.015, 0.015), rng.Uniform(-0.055, 0.055),
                       rng.Uniform(-0.07, -0.03));
    }
    for (const double side : {-1.0, 1.0}) {
      for (int i = 0; i < 40; ++i) {
        pts.emplace_back(rng.Uniform(-0.01, 0.01),
                         side * rng.Uniform(0.04, 0.05),
                         rng.Uniform(-0.03, 0.02));
      }
    }
    return pts;
  }();
  return points;
}

HarnessCase MakePickScene(std::uint64_t seed, const HarnessOptions& options) {
  return BuildScene(seed, options, false);
}

HarnessCase MakePlaceScene(std::uint64_t seed, const HarnessOptions& options) {
  return BuildScene(seed, options, true);
}

std::optional<std::string> TaskObjectId(const Scene& scene) {
  if (!scene.task) return std::nullopt;
  if (const auto* p = std::get_if<PickLift>(&*scene.task)) return p->object_id;
  if (const auto* p = std::get_if<PlaceInto>(&*scene.task)) return p->object_id;
  return std::nullopt;
}

Pose HomePose(const Scene& scene, const PlanarPose& dock) {
  return Compose(PlanarToWorld(dock, scene.robot.base_height), scene.robot.home);
}

KinematicWorld::KinematicWorld(const Scene& scene, const PlanarPose& dock)
    : scene_(&scene), dock_(dock), ee_(HomePose(scene, dock)) {
  for (const SceneObject& obj : scene.objects) poses_[obj.id] = obj.shape.pose;
}

Pose KinematicWorld::ObjectPose(const std::string& id) const {
  const auto it = poses_.find(id);
  if (it == poses_.end()) {
    throw Error(ErrorKind::kInvariant, "unknown object '" + id + "'");
  }
  return it->second;
}

KinematicWorld::StepEvents KinematicWorld::Step(const Action& action) {
  StepEvents ev;
  const double prev = gripper_;
  ee_ = action.target_pose;
  if (held_) poses_[*held_] = Compose(ee_, held_offset_);
  const bool close = prev < 0.5 && action.gripper_cmd >= 0.5;
  const bool open = prev >= 0.5 && action.gripper_cmd < 0.5;
  if (close && !held_) {
    const SceneObject* best = nullptr;
    double best_d = scene_->grasp_radius;
    for (const SceneObject& obj : scene_->objects) {
      if (!obj.movable) continue;
      const double d = (poses_[obj.id].position() - ee_.position()).norm();
      if (d <= best_d) {
        best_d = d;
        best = &obj;
      }
    }
    if (best != nullptr) {
      held_ = best->id;
      held_offset_ = Compose(Inverse(ee_), poses_[best->id]);
      ev.grasped = best->id;
    }
  } else if (open && held_) {
    ev.released = held_;
    held_.reset();
  }
  gripper_ = action.gripper_cmd;
  return ev;
}

PointCloud KinematicWorld::Render(int point_count, std::uint64_t fps_seed) const {
  PointCloud raw;
  const std::vector<Vec3>& gripper = GripperTemplate();
  std::size_t total = scene_->background.size() + gripper.size();
  for (const SceneObject& obj : scene_->objects) total += obj.points.size();
  raw.points.reserve(total);
  raw.labels.reserve(total);
  for (const Vec3& p : scene_->background) {
    raw.points.push_back(p);
    raw.labels.push_back(Label::Other());
  }
  for (const SceneObject& obj : scene_->objects) {
    if (!obj.label || obj.points.empty()) continue;
    const Pose& now = poses_.at(obj.id);
    const bool moved = !(now == obj.shape.pose);
    const Pose map = Compose(now, Inverse(obj.shape.pose));
    for (const Vec3& p : obj.points) {
      raw.points.push_back(moved ? map * p : p);
      raw.labels.push_back(*obj.label);
    }
  }
  for (const Vec3& p : gripper) {
    raw.points.push_back(ee_ * p);
    raw.labels.push_back(Label::Arm());
  }
  // Stored clouds are float32; quantize here so that in-memory and on-disk
  // values agree exactly.
  for (Vec3& p : raw.points) p = p.cast<float>().cast<double>();
  const PointCloud cropped = CropAabb(raw, scene_->crop);
  return FpsDownsample(cropped, static_cast<std::size_t>(point_count), fps_seed);
}

bool KinematicWorld::TaskSatisfied() const {
  if (!scene_->task) return false;
  if (const auto* t = std::get_if<PickLift>(&*scene_->task)) {
    const SceneObject* obj = scene_->FindObject(t->object_id);
    return obj != nullptr &&
           ObjectPose(t->object_id).position().z() >=
               obj->shape.pose.position().z() + t->dz;
  }
  if (const auto* t = std::get_if<PlaceInto>(&*scene_->task)) {
    return held_ != t->object_id &&
           t->region.Contains(ObjectPose(t->object_id).position());
  }
  const auto& t = std::get<ReachPose>(*scene_->task);
  return (ee_.position() - t.pose.position()).norm() <= t.tolerance;
}

ScriptedDemo MakeScriptedDemo(const Scene& scene, const PlanarPose& dock,
                              std::uint64_t noise_seed,
                              const HarnessOptions& options,
                              const std::string& demo_id) {
  const std::optional<std::string> target = TaskObjectId(scene);
  const SceneObject* obj = target ? scene.FindObject(*target) : nullptr;
  if (obj == nullptr || !obj->movable) {
    throw Error(ErrorKind::kGeneration,
                "scene '" + scene.id + "' has no movable task object to script");
  }
  if (!(options.step > 0.0)) {
    throw Error(ErrorKind::kConfig, "scripted step must be positive");
  }
  Rng rng(noise_seed);
  const Vec3 c = obj->shape.pose.position();
  const double nx = rng.Uniform(-1.0, 1.0) * options.noise;
  const double ny = rng.Uniform(-1.0, 1.0) * options.noise;
  const double lift = 0.08 + rng.Uniform(0.0, 1.0) * options.noise;

  ScriptedDemo out;
  Demonstration& d = out.demo;
  d.id = demo_id;
  d.docking = dock;
  d.scene_id = scene.id;
  d.provenance = Provenance::Source();

  KinematicWorld world(scene, dock);
  const Quat grip = HomePose(scene, dock).orientation();
  const auto check_reach = [&](const Vec3& p, const char* what) {
    if (scene.workspace.Margin(dock, p) <= 0.0) {
      throw Error(ErrorKind::kGeneration, std::string("scripted ") + what +
                                              " pose is out of reach from the dock");
    }
  };
  // Emits one frame per step of at most options.step; the last step carries
  // `last_cmd`.
  const auto move = [&](const std::string& phase, bool contact, const Vec3& goal,
                        double cmd, double last_cmd) {
    const Pose start = world.ee();
    const Pose end(goal, grip);
    const double dist = (goal - start.position()).norm();
    const auto n = static_cast<int>(std::max(1.0, std::ceil(dist / options.step)));
    PhaseEvent ev{phase, static_cast<std::int64_t>(d.frames.size()), 0, contact};
    for (int i = 1; i <= n; ++i) {
      DemoFrame f;
      f.t = static_cast<std::int64_t>(d.frames.size());
      try {
        f.cloud = world.Render(options.point_count, options.fps_seed);
      } catch (const Error& e) {
        throw Error(ErrorKind::kGeneration, "cannot render frame " +
                                                std::to_string(f.t) + ": " + e.what());
      }
      f.state = {world.ee(), world.gripper()};
      f.action = {i == n ? end : Interpolate(start, end, static_cast<double>(i) / n),
                  i == n ? last_cmd : cmd};
      world.Step(f.action);
      d.frames.push_back(std::move(f));
    }
    ev.end = static_cast<std::int64_t>(d.frames.size());
    out.phases.push_back(ev);
  };

  const Vec3 pregrasp = c + Vec3(nx, ny, 0.15);
  const Vec3 top = c + Vec3(0.0, 0.0, lift);
  check_reach(pregrasp, "pregrasp");
  check_reach(c, "grasp");
  check_reach(top, "lift");
  move("approach", false, pregrasp, 0.0, 0.0);
  move("grasp", true, c, 0.0, 1.0);
  move("lift", true, top, 1.0, 1.0);

  if (const auto* place = std::get_if<PlaceInto>(&*scene.task)) {
    const Vec3 center = 0.5 * (place->region.min_corner + place->region.max_corner);
    const double place_z = 0.48;
    const Vec3 preplace(center.x() + ny, center.y() + nx, place_z + 0.1);
    const Vec3 drop(center.x(), center.y(), place_z);
    const Vec3 retreat = drop + Vec3(0.0, 0.0, 0.03);
    check_reach(preplace, "preplace");
    check_reach(drop, "place");
    move("transport", false, preplace, 1.0, 1.0);
    move("place", true, drop, 1.0, 0.0);
    move("retreat", true, retreat, 0.0, 0.0);
  }

  if (!world.TaskSatisfied()) {
    throw Error(ErrorKind::kGeneration,
                "scripted demo in '" + scene.id + "' does not achieve its task");
  }
  return out;
}

StepCheck InspectStep(const KinematicWorld& world, const Action& action,
                      const ReplayOptions& options) {
  StepCheck out;
  const Scene& scene = world.scene();
  const Vec3& a = world.ee().position();
  const Vec3& b = action.target_pose.position();
  out.jump = (b - a).norm();
  out.rot_jump = RotationDistance(world.ee().orientation(),
                                  action.target_pose.orientation());
  for (const SceneObject& obj : scene.objects) {
    if (world.held() == obj.id) continue;
    Shape shape = obj.shape;
    shape.pose = world.ObjectPose(obj.id);
    if (obj.label) {
      const Vec3& center = shape.pose.position();
      if ((a - center).norm() < options.contact_radius ||
          (b - center).norm() < options.contact_radius) {
        continue;
      }
    }
    if (SegmentSignedDistance(shape, a, b) <= options.clearance) {
      out.collisions.push_back(obj.id);
    }
  }
  const Workspace& ws = scene.workspace;
  const PlanarPose& dock = world.dock();
  if (ws.Margin(dock, b) <= 0.0) {
    out.leaves_workspace = true;
  } else {
    const Eigen::Vector2d pa = a.head<2>(), pb = b.head<2>();
    const Eigen::Vector2d d = pb - pa;
    const double len2 = d.squaredNorm();
    const double t =
        len2 > 0.0 ? std::clamp((dock.xy() - pa).dot(d) / len2, 0.0, 1.0) : 0.0;
    out.leaves_workspace = (pa + t * d - dock.xy()).norm() <= ws.r_min;
  }
  return out;
}

ReplayReport Replay(const Scene& scene, const Demonstration& demo,
                    const ReplayOptions& options) {
  ReplayReport report;
  KinematicWorld world(scene, demo.docking);
  for (const Polygon2& poly : scene.floorplan) {
    if (DiskIntersectsPolygon(demo.docking.xy(), scene.robot.footprint_radius,
                              poly)) {
      report.collisions.push_back({0, "floorplan"});
      break;
    }
  }
  if (const std::optional<std::string> target = TaskObjectId(scene)) {
    const VisibilityResult vis = CheckVisibility(scene, demo.docking, *target,
                                                 options.min_visible_fraction);
    report.visible_fraction = vis.fraction;
    report.target_occluded = !vis.pass;
  }
  for (std::size_t i = 0; i < demo.frames.size(); ++i) {
    const auto step = static_cast<std::int64_t>(i);
    const Action& action = demo.frames[i].action;
    const StepCheck check = InspectStep(world, action, options);
    for (const std::string& id : check.collisions) {
      report.collisions.push_back({step, id});
    }
    if (check.leaves_workspace) report.reach_violations.push_back(step);
    report.max_step_jump = std::max(report.max_step_jump, check.jump);
    if ((options.max_jump > 0.0 && check.jump > options.max_jump) ||
        (options.max_rot_jump > 0.0 && check.rot_jump > options.max_rot_jump)) {
      report.jump_violations.push_back(step);
    }
    const KinematicWorld::StepEvents ev = world.Step(action);
    if (ev.grasped) report.grasps.push_back({step, *ev.grasped, true});
    if (ev.released) report.grasps.push_back({step, *ev.released, false});
  }
  report.success = world.TaskSatisfied();
  return report;
}

std::string FormatReplayReport(const ReplayReport& r) {
  std::ostringstream out;
  out << (r.pass() ? "pass" : "FAIL") << " success=" << (r.success ? 1 : 0)
      << " collisions=" << r.collisions.size()
      << " reach_violations=" << r.reach_violations.size()
      << " occluded=" << (r.target_occluded ? 1 : 0)
      << " visible=" << r.visible_fraction << " max_jump=" << r.max_step_jump;
  for (const CollisionEvent& c : r.collisions) {
    out << "\n  collision step " << c.step << " with " << c.what;
  }
  return out.str();
}

}  // namespace dockaug
