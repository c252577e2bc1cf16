#ifndef DOCKAUG_NN_POLICY_H_
#define DOCKAUG_NN_POLICY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dockaug/demo_model.h"
#include "dockaug/dock_sampler.h"
#include "dockaug/scene.h"
#include "dockaug/sim_harness.h"

namespace dockaug {

// Version of the nearest-neighbor feature layout. Bump on any change to
// NnFeatures so that external re-implementations refuse stale logs.
//
// Everything is expressed in the base frame of the demo's dock (the dock
// pose lifted to 3D at height zero), as a robot-mounted sensor would see it.
// Layout, all float64, positions in meters:
//   [0, 3)           centroid of the arm-labeled points
//   [3, 3 + 3k)      centroid of each labeled scene object, in scene order;
//                    zeros when the object has no points in the frame
//   next 3           end-effector position
//   next 4           end-effector quaternion (w, x, y, z) with w >= 0
//   last 1           gripper state
// Distance is the unweighted squared Euclidean norm; ties go to the lowest
// (demo, frame) index.
inline constexpr int kNnFeatureVersion = 1;

// Labeled objects of the scene in declaration order.
std::vector<Label> FeatureObjectLabels(const Scene& scene);

std::vector<double> NnFeatures(const PointCloud& cloud, const RobotState& state,
                               std::span<const Label> object_labels,
                               const PlanarPose& dock);

// Memorizes every (observation, action) pair of the training demos, both in
// the base frame of the demo's dock, and replays the base-frame action of
// the closest observation from the current dock.
class NnPolicy {
 public:
  NnPolicy(std::span<const Demonstration* const> demos,
           std::vector<Label> object_labels);

  struct Choice {
    std::size_t demo = 0;
    std::int64_t frame = 0;
    double distance = 0.0;
    Action action;  // base frame
    bool last_frame = false;  // the demo ends with this frame
    std::size_t row = 0;

    // The action in the world for a base at `dock`.
    Action InWorld(const PlanarPose& dock) const;
  };
  Choice Act(std::span<const double> features) const;
  // Frame after `c` in the same demo; `c` itself when it is the last one.
  Choice Successor(const Choice& c) const;

  const std::vector<Label>& object_labels() const { return labels_; }
  std::size_t size() const { return actions_.size(); }

 private:
  Choice Row(std::size_t r, double distance) const;

  std::vector<Label> labels_;
  std::size_t dim_ = 0;
  std::vector<double> features_;  // row-major, one row per frame
  std::vector<Action> actions_;
  std::vector<std::size_t> demo_;
  std::vector<std::int64_t> frame_;
  std::vector<bool> last_;
};

struct RolloutConfig {
  int horizon = 300;
  int point_count = 1024;
  std::uint64_t fps_seed = 0;
  // Commanded moves larger than these are refused as teleports.
  ReplayOptions checks{0.03, 0.1, 0.5, 0.04, 0.2};
};

struct RolloutStep {
  std::int64_t step = 0;
  std::vector<double> features;
  std::size_t demo = 0;
  std::int64_t frame = 0;
  Action action;
};

struct RolloutLog {
  PlanarPose dock;
  bool success = false;
  std::string failure;  // empty on success
  std::vector<RolloutStep> steps;
};

// Closed-loop episode from `dock`: render, featurize, act, check, step.
// A matched action that would leave the arm where it is (same pose, same
// gripper state) is replaced by the next frame of that demo, so the policy
// cannot park on a frame whose action is its own position.
// Stops at the first collision, workspace exit or refused jump, when the
// policy reaches the final frame of a demo with the task satisfied, or at
// the horizon.
RolloutLog Rollout(const NnPolicy& policy, const Scene& scene,
                   const PlanarPose& dock, const RolloutConfig& config);

// One rollout per test dock.
std::vector<RolloutLog> NnPolicyEval(std::span<const Demonstration* const> train,
                                     const Scene& scene,
                                     std::span<const PlanarPose> test_docks,
                                     const RolloutConfig& config);

// Success rate of policies trained on the source plus the first k augmented
// docks, for each k in dock_counts, at docks no training set contains.
struct TrendConfig {
  int seeds = 20;
  int test_docks = 5;
  std::vector<int> dock_counts = {0, 1, 2, 4};
  std::uint64_t base_seed = 0;
  bool place = false;  // pick scene by default
  HarnessOptions harness;
  SamplerConfig sampler;
  RolloutConfig rollout;
};

struct TrendResult {
  std::vector<int> dock_counts;
  // successes[i][s]: successful test docks for dock_counts[i] at seed s.
  std::vector<std::vector<int>> successes;
  std::vector<double> mean_success;  // fraction over all seeds and docks
  int trials_per_count = 0;
};

TrendResult EvaluateTrend(const TrendConfig& config);

std::string RolloutLogToJson(const RolloutLog& log);

}  // namespace dockaug

#endif  // DOCKAUG_NN_POLICY_H_
