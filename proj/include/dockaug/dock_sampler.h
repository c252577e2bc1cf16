#ifndef DOCKAUG_DOCK_SAMPLER_H_
#define DOCKAUG_DOCK_SAMPLER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dockaug/demo_model.h"
#include "dockaug/error.h"
#include "dockaug/motion_replanner.h"
#include "dockaug/scene.h"
#include "dockaug/trajectory_parser.h"

namespace dockaug {

struct SamplerConfig {
  int n_docks = 4;
  double range_lo = 0.8;
  double range_hi = 1.2;
  double yaw_jitter = 0.35;  // radians, for both polar angle and heading
  std::uint64_t seed = 0;
  int max_attempts = 200;
  double min_visible_fraction = 0.5;
  PlannerConfig planner;

  // Throws a config error on invalid values.
  void Validate() const;
};

struct VisibilityResult {
  bool pass = false;
  double fraction = 0.0;
  int visible = 0;
  int total = 0;
};

struct ReachabilityResult {
  bool pass = false;
  double margin = 0.0;  // meters, positive inside the annulus
  std::int64_t worst_frame = -1;
};

struct CollisionResult {
  bool pass = false;
  bool base_clear = false;
  // Index into the motion path list of the first failing path (-1 if none).
  int failing_index = -1;
  std::string failing_shape;
};

struct FeasibilityReport {
  int attempt = -1;
  PlanarPose dock;
  VisibilityResult visibility;
  ReachabilityResult reachability;
  CollisionResult collision_free;
  bool accepted = false;
};

// Fraction of the target's points inside the camera frustum and not hidden
// behind another object's shape or the robot body standing at `dock`.
VisibilityResult CheckVisibility(const Scene& scene, const PlanarPose& dock,
                                 const std::string& target_id,
                                 double min_fraction);

// Skill-segment action positions against the reach annulus of `dock`.
ReachabilityResult CheckReachability(const Scene& scene, const PlanarPose& dock,
                                     const ParsedTrajectory& parsed,
                                     const Demonstration& demo);

// Base footprint against the floorplan and every motion path against the
// object shapes inflated by `clearance`.
CollisionResult CheckCollisionFree(const Scene& scene, const PlanarPose& dock,
                                   const std::vector<MotionPath>& paths,
                                   double clearance);

// Runs all three checks for one candidate. Planning failures count as
// collision failures.
FeasibilityReport EvaluateDock(const Scene& scene, const Demonstration& source,
                               const ParsedTrajectory& parsed,
                               const PlanarPose& dock,
                               const SamplerConfig& config);

struct SampleResult {
  std::vector<FeasibilityReport> accepted;
  std::vector<FeasibilityReport> rejected;  // in attempt order
  int attempts = 0;
  RejectionHistogram histogram;  // keys: visibility, reachability, collision
};

// Draws candidates around the target object until n_docks pass. The radius
// is the source distance times U(lo, hi), the polar angle the source angle
// plus U(-jitter, jitter), and the heading faces the object (keeping the
// source's heading offset) plus U(-jitter, jitter). Throws ExhaustionError
// after max_attempts.
SampleResult SampleDocks(const Scene& scene, const Demonstration& source,
                         const ParsedTrajectory& parsed,
                         const SamplerConfig& config);

// The first `count` candidates of the stream SampleDocks draws from.
std::vector<PlanarPose> CandidateDocks(const Demonstration& source,
                                       const ParsedTrajectory& parsed,
                                       const SamplerConfig& config, int count);

}  // namespace dockaug

#endif  // DOCKAUG_DOCK_SAMPLER_H_
