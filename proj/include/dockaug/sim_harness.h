#ifndef DOCKAUG_SIM_HARNESS_H_
#define DOCKAUG_SIM_HARNESS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dockaug/demo_model.h"
#include "dockaug/scene.h"

namespace dockaug {

// Geometry of the bundled desk-scale scenes.
struct HarnessOptions {
  int point_count = 1024;
  std::uint64_t fps_seed = 0;
  double step = 0.01;        // scripted translation per frame, meters
  double noise = 0.003;      // amplitude of scripted waypoint noise, meters
  int background_points = 0;  // 0 picks a count that leaves room for FPS
};

struct HarnessCase {
  Scene scene;
  PlanarPose source_dock;
};

// Table with a cube to lift. `seed` places the cube and the scattered
// background points.
HarnessCase MakePickScene(std::uint64_t seed, const HarnessOptions& options = {});
// Same table with a bin next to the cube; the cube must end up in the bin.
HarnessCase MakePlaceScene(std::uint64_t seed, const HarnessOptions& options = {});

// 128 points of a parallel gripper in the end-effector frame.
const std::vector<Vec3>& GripperTemplate();

// Object the scene's success predicate refers to, if any.
std::optional<std::string> TaskObjectId(const Scene& scene);

// End-effector rest pose in the world for a base at `dock`.
Pose HomePose(const Scene& scene, const PlanarPose& dock);

// Kinematic stand-in for the robot and objects. The end-effector is placed
// at each commanded pose; a held object keeps its grasp-time offset.
// The scene is borrowed and must outlive the world.
class KinematicWorld {
 public:
  KinematicWorld(const Scene& scene, const PlanarPose& dock);

  struct StepEvents {
    std::optional<std::string> grasped;
    std::optional<std::string> released;
  };
  StepEvents Step(const Action& action);

  const Scene& scene() const { return *scene_; }
  const PlanarPose& dock() const { return dock_; }
  const Pose& ee() const { return ee_; }
  double gripper() const { return gripper_; }
  const std::optional<std::string>& held() const { return held_; }
  // Current pose of a scene object (initial pose if never moved).
  Pose ObjectPose(const std::string& id) const;

  // Labeled cloud of the current state: background, object templates and
  // the gripper, cropped and FPS-downsampled like a preprocessed camera
  // frame.
  PointCloud Render(int point_count, std::uint64_t fps_seed) const;

  bool TaskSatisfied() const;

 private:
  const Scene* scene_;
  PlanarPose dock_;
  Pose ee_;
  double gripper_ = 0.0;
  std::optional<std::string> held_;
  Pose held_offset_;
  std::map<std::string, Pose> poses_;
};

struct PhaseEvent {
  std::string name;  // approach, grasp, lift, transport, place, release, retreat
  std::int64_t begin = 0;
  std::int64_t end = 0;
  bool contact = false;  // true for phases performed at an object
};

struct ScriptedDemo {
  Demonstration demo;
  std::vector<PhaseEvent> phases;
};

// Source demonstration of the scene's task from `dock`. Throws a generation
// error when the task cannot be scripted from there.
ScriptedDemo MakeScriptedDemo(const Scene& scene, const PlanarPose& dock,
                              std::uint64_t noise_seed,
                              const HarnessOptions& options = {},
                              const std::string& demo_id = "source");

struct ReplayOptions {
  double clearance = 0.03;        // shape inflation
  double contact_radius = 0.1;    // task objects are exempt this close
  double min_visible_fraction = 0.5;
  double max_jump = 0.0;          // > 0 flags larger commanded translations
  double max_rot_jump = 0.0;      // > 0 flags larger commanded rotations
};

// Checks of one commanded move from the world's current end-effector pose.
// Every shape except the held object is inflated by the clearance; labeled
// objects are exempt while the end-effector is within contact_radius of
// their current center, since touching them is the task.
struct StepCheck {
  std::vector<std::string> collisions;  // object ids
  bool leaves_workspace = false;
  double jump = 0.0;
  double rot_jump = 0.0;
};
StepCheck InspectStep(const KinematicWorld& world, const Action& action,
                      const ReplayOptions& options);

struct CollisionEvent {
  std::int64_t step = 0;
  std::string what;  // object id or "floorplan"
};

struct GraspEvent {
  std::int64_t step = 0;
  std::string object_id;
  bool grasp = true;
};

struct ReplayReport {
  bool success = false;
  std::vector<CollisionEvent> collisions;
  std::vector<std::int64_t> reach_violations;  // steps leaving the annulus
  bool target_occluded = false;
  double visible_fraction = 0.0;
  double max_step_jump = 0.0;
  std::vector<std::int64_t> jump_violations;
  std::vector<GraspEvent> grasps;

  bool pass() const {
    return success && collisions.empty() && reach_violations.empty() &&
           !target_occluded && jump_violations.empty();
  }
};

// Steps a fresh world at the demo's dock through every action.
ReplayReport Replay(const Scene& scene, const Demonstration& demo,
                    const ReplayOptions& options = {});

std::string FormatReplayReport(const ReplayReport& report);

}  // namespace dockaug

#endif  // DOCKAUG_SIM_HARNESS_H_
