#ifndef DOCKAUG_MOTION_REPLANNER_H_
#define DOCKAUG_MOTION_REPLANNER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dockaug/demo_model.h"
#include "dockaug/geometry.h"
#include "dockaug/scene.h"
#include "dockaug/trajectory_parser.h"

namespace dockaug {

struct PlannerConfig {
  double max_step = 0.02;      // meters between waypoints
  double max_rot_step = 0.1;   // radians between waypoints
  double clearance = 0.03;     // end-effector inflation radius
  int max_iters = 64;          // random via-points tried by the last tier
  std::uint64_t seed = 0;
};

struct MotionPath {
  std::vector<Pose> waypoints;
  int segment_index = -1;  // index into ParsedTrajectory::segments
  // Objects exempt from collision checks, e.g. the one being carried.
  std::vector<std::string> ignored;
  // 0 straight line, 1 lifted via-point, 2 sampled via-point, -1 unchecked.
  int tier = 0;
};

struct Obstruction {
  std::size_t segment = 0;  // waypoint segment [segment, segment + 1]
  std::string shape_id;     // object id, or "workspace"
};

// First waypoint segment that comes within `clearance` of a non-ignored
// shape or leaves the reach annulus of `dock`. Shapes are tested in scene
// order, so the reported id is deterministic.
std::optional<Obstruction> FindObstruction(std::span<const Pose> waypoints,
                                           const Scene& scene,
                                           const PlanarPose& dock,
                                           double clearance,
                                           std::span<const std::string> ignored);

// Straight SE(3) interpolation: ceil(max(d / max_step, angle / max_rot_step))
// segments, endpoints exact. start == goal gives a single waypoint.
std::vector<Pose> StraightLine(const Pose& start, const Pose& goal,
                               const PlannerConfig& config);

// Three-tier planner: straight line, one via-point lifted over the blocking
// shape, then random via-points in the reach volume in order of path length.
// Throws PlanningFailure naming the shape blocking the straight line.
MotionPath Replan(const Pose& start, const Pose& goal, const Scene& scene,
                  const PlanarPose& dock, const PlannerConfig& config,
                  std::span<const std::string> ignored = {});

// Start and goal of every motion segment of `parsed` for a dock. The leading
// segment starts from the source's initial observed pose carried along with
// the base; later segments start at the previous skill's last action. A
// segment followed by a skill ends at that skill's first action; a trailing
// segment ends at the source's final action.
struct MotionEndpoints {
  int segment_index = -1;
  Pose start;
  Pose goal;
  bool skill_follows = false;
  std::vector<std::string> ignored;
};
std::vector<MotionEndpoints> MotionSegmentEndpoints(
    const Demonstration& source, const ParsedTrajectory& parsed,
    const Scene& scene, const PlanarPose& dock);

// Plans every motion segment; `checked` false skips collision and workspace
// tests and returns straight lines (used to build negative controls).
std::vector<MotionPath> PlanMotionSegments(const Demonstration& source,
                                           const ParsedTrajectory& parsed,
                                           const Scene& scene,
                                           const PlanarPose& dock,
                                           const PlannerConfig& config,
                                           bool checked = true);

double PathLength(std::span<const Pose> waypoints);

// Arc-length-uniform resampling to n >= 2 poses. Endpoints are copied
// exactly. A path of zero length is resampled uniformly in waypoint index.
std::vector<Pose> Retime(std::span<const Pose> waypoints, std::size_t n);

struct RetimePolicy {
  enum class Kind { kMatch, kSource, kFixed };
  Kind kind = Kind::kMatch;
  std::size_t fixed = 0;  // kFixed: poses per retimed path

  // "match", "source" or "fixed:<n>".
  static RetimePolicy FromString(const std::string& text);
  std::string ToString() const;
};

// Number of poses of the retimed path for one motion segment. `median_step`
// is the median translation step of the source's motion frames;
// `source_frames` the source segment length; `dropped` how many endpoints the
// caller will drop.
std::size_t RetimeCount(const RetimePolicy& policy, double arc_length,
                        double median_step, std::int64_t source_frames,
                        int dropped);

// Median translation step between consecutive source actions inside motion
// segments (0 when there is none).
double MedianMotionStep(const Demonstration& source,
                        const ParsedTrajectory& parsed);

}  // namespace dockaug

#endif  // DOCKAUG_MOTION_REPLANNER_H_
