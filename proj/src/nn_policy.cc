#include "dockaug/nn_policy.h"

#include <algorithm>
#include <limits>

#include "dockaug/augmentor.h"
#include "dockaug/error.h"
#include "dockaug/pointcloud_ops.h"
#include "dockaug/random.h"
#include "dockaug/trajectory_parser.h"
#include "json_util.h"

namespace dockaug {
namespace {

Pose BaseFrame(const PlanarPose& dock) { return PlanarToWorld(dock, 0.0); }

constexpr double kStallTranslation = 1e-4;
constexpr double kStallRotation = 1e-4;

bool IsStall(const KinematicWorld& world, const Action& a) {
  const Pose& ee = world.ee();
  return (a.target_pose.position() - ee.position()).norm() < kStallTranslation &&
         RotationDistance(a.target_pose.orientation(), ee.orientation()) <
             kStallRotation &&
         (a.gripper_cmd >= 0.5) == (world.gripper() >= 0.5);
}

}  // namespace

std::vector<Label> FeatureObjectLabels(const Scene& scene) {
  std::vector<Label> out;
  for (const SceneObject& obj : scene.objects) {
    if (obj.label) out.push_back(*obj.label);
  }
  return out;
}

std::vector<double> NnFeatures(const PointCloud& cloud, const RobotState& state,
                               std::span<const Label> object_labels,
                               const PlanarPose& dock) {
  const Pose to_base = Inverse(BaseFrame(dock));
  const std::size_t k = object_labels.size();
  std::vector<Vec3> sums(k + 1, Vec3::Zero());
  std::vector<std::size_t> counts(k + 1, 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Label l = cloud.labels[i];
    std::size_t slot = k + 1;
    if (l == Label::Arm()) {
      slot = 0;
    } else {
      for (std::size_t j = 0; j < k; ++j) {
        if (object_labels[j] == l) {
          slot = j + 1;
          break;
        }
      }
    }
    if (slot <= k) {
      sums[slot] += cloud.points[i];
      ++counts[slot];
    }
  }
  std::vector<double> f;
  f.reserve(3 * (k + 1) + 8);
  for (std::size_t j = 0; j <= k; ++j) {
    const Vec3 c = counts[j] > 0
                       ? Vec3(to_base * Vec3(sums[j] / static_cast<double>(counts[j])))
                       : Vec3::Zero();
    f.insert(f.end(), {c.x(), c.y(), c.z()});
  }
  const Pose ee = Compose(to_base, state.ee_pose);
  const Vec3& p = ee.position();
  const Quat q = CanonicalQuat(ee.orientation());
  f.insert(f.end(), {p.x(), p.y(), p.z(), q.w(), q.x(), q.y(), q.z(), state.gripper});
  return f;
}

NnPolicy::NnPolicy(std::span<const Demonstration* const> demos,
                   std::vector<Label> object_labels)
    : labels_(std::move(object_labels)) {
  dim_ = 3 * (labels_.size() + 1) + 8;
  for (std::size_t d = 0; d < demos.size(); ++d) {
    const Demonstration& demo = *demos[d];
    const Pose to_base = Inverse(BaseFrame(demo.docking));
    for (std::size_t t = 0; t < demo.frames.size(); ++t) {
      const DemoFrame& f = demo.frames[t];
      const std::vector<double> feat =
          NnFeatures(f.cloud, f.state, labels_, demo.docking);
      features_.insert(features_.end(), feat.begin(), feat.end());
      actions_.push_back({Compose(to_base, f.action.target_pose), f.action.gripper_cmd});
      demo_.push_back(d);
      frame_.push_back(f.t);
      last_.push_back(t + 1 == demo.frames.size());
    }
  }
  if (actions_.empty()) {
    throw Error(ErrorKind::kEmptyInput, "nearest-neighbor policy needs training frames");
  }
}

NnPolicy::Choice NnPolicy::Act(std::span<const double> features) const {
  if (features.size() != dim_) {
    throw Error(ErrorKind::kSize, "feature vector has " +
                                      std::to_string(features.size()) +
                                      " entries, policy expects " +
                                      std::to_string(dim_));
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < actions_.size(); ++r) {
    const double* row = features_.data() + r * dim_;
    double d = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double e = row[j] - features[j];
      d += e * e;
    }
    if (d < best_d) {
      best_d = d;
      best = r;
    }
  }
  return Row(best, best_d);
}

NnPolicy::Choice NnPolicy::Successor(const Choice& c) const {
  if (c.last_frame) return c;
  return Row(c.row + 1, c.distance);
}

NnPolicy::Choice NnPolicy::Row(std::size_t r, double distance) const {
  Choice c;
  c.demo = demo_[r];
  c.frame = frame_[r];
  c.distance = distance;
  c.action = actions_[r];
  c.last_frame = last_[r];
  c.row = r;
  return c;
}

Action NnPolicy::Choice::InWorld(const PlanarPose& dock) const {
  return {Compose(BaseFrame(dock), action.target_pose), action.gripper_cmd};
}

RolloutLog Rollout(const NnPolicy& policy, const Scene& scene,
                   const PlanarPose& dock, const RolloutConfig& config) {
  RolloutLog log;
  log.dock = dock;
  KinematicWorld world(scene, dock);
  const ReplayOptions& checks = config.checks;
  for (int step = 0; step < config.horizon; ++step) {
    const PointCloud cloud = world.Render(config.point_count, config.fps_seed);
    RolloutStep rs;
    rs.step = step;
    rs.features = NnFeatures(cloud, {world.ee(), world.gripper()},
                             policy.object_labels(), dock);
    NnPolicy::Choice choice = policy.Act(rs.features);
    Action action = choice.InWorld(dock);
    if (IsStall(world, action)) {
      choice = policy.Successor(choice);
      action = choice.InWorld(dock);
    }
    rs.demo = choice.demo;
    rs.frame = choice.frame;
    rs.action = action;
    log.steps.push_back(rs);

    const StepCheck check = InspectStep(world, action, checks);
    const std::string at = " at step " + std::to_string(step);
    if (!check.collisions.empty()) {
      log.failure = "collision with " + check.collisions.front() + at;
    } else if (check.leaves_workspace) {
      log.failure = "workspace exit" + at;
    } else if ((checks.max_jump > 0.0 && check.jump > checks.max_jump) ||
               (checks.max_rot_jump > 0.0 && check.rot_jump > checks.max_rot_jump)) {
      log.failure = "refused jump" + at;
    }
    if (!log.failure.empty()) return log;
    world.Step(action);
    if (choice.last_frame && world.TaskSatisfied()) break;
  }
  log.success = world.TaskSatisfied();
  if (!log.success) log.failure = "task not achieved";
  return log;
}

std::vector<RolloutLog> NnPolicyEval(std::span<const Demonstration* const> train,
                                     const Scene& scene,
                                     std::span<const PlanarPose> test_docks,
                                     const RolloutConfig& config) {
  const NnPolicy policy(train, FeatureObjectLabels(scene));
  std::vector<RolloutLog> out;
  out.reserve(test_docks.size());
  for (const PlanarPose& dock : test_docks) {
    out.push_back(Rollout(policy, scene, dock, config));
  }
  return out;
}

TrendResult EvaluateTrend(const TrendConfig& config) {
  TrendResult result;
  result.dock_counts = config.dock_counts;
  result.successes.assign(config.dock_counts.size(), {});
  const int max_docks =
      *std::max_element(config.dock_counts.begin(), config.dock_counts.end());

  for (int s = 0; s < config.seeds; ++s) {
    const std::uint64_t seed = MixSeed(config.base_seed, static_cast<std::uint64_t>(s));
    const HarnessCase hc = config.place ? MakePlaceScene(seed, config.harness)
                                        : MakePickScene(seed, config.harness);
    const ScriptedDemo src =
        MakeScriptedDemo(hc.scene, hc.source_dock, seed, config.harness);
    const ParsedTrajectory parsed = Parse(src.demo, hc.scene);

    SamplerConfig train_cfg = config.sampler;
    train_cfg.n_docks = std::max(max_docks, 1);
    train_cfg.seed = MixSeed(seed, 101);
    const SampleResult train_docks = SampleDocks(hc.scene, src.demo, parsed, train_cfg);
    std::vector<Demonstration> augmented;
    for (std::size_t i = 0; i < train_docks.accepted.size(); ++i) {
      AugmentationJob job{&src.demo, &parsed, &hc.scene,
                          train_docks.accepted[i].dock, static_cast<int>(i),
                          train_cfg.planner.seed};
      AugmentOptions opts;
      opts.planner = train_cfg.planner;
      augmented.push_back(Augment(job, opts));
    }

    SamplerConfig test_cfg = config.sampler;
    test_cfg.n_docks = config.test_docks;
    test_cfg.seed = MixSeed(seed, 202);
    std::vector<PlanarPose> test_docks;
    for (const FeasibilityReport& r :
         SampleDocks(hc.scene, src.demo, parsed, test_cfg).accepted) {
      test_docks.push_back(r.dock);
    }

    for (std::size_t c = 0; c < config.dock_counts.size(); ++c) {
      std::vector<const Demonstration*> train = {&src.demo};
      std::size_t longest = src.demo.frames.size();
      for (int i = 0; i < config.dock_counts[c]; ++i) {
        train.push_back(&augmented[static_cast<std::size_t>(i)]);
        longest = std::max(longest, augmented[static_cast<std::size_t>(i)].frames.size());
      }
      RolloutConfig rc = config.rollout;
      rc.point_count = config.harness.point_count;
      rc.fps_seed = config.harness.fps_seed;
      rc.horizon = static_cast<int>(longest + longest / 2);
      int wins = 0;
      for (const RolloutLog& log : NnPolicyEval(train, hc.scene, test_docks, rc)) {
        wins += log.success ? 1 : 0;
      }
      result.successes[c].push_back(wins);
    }
  }
  result.trials_per_count = config.seeds * config.test_docks;
  for (const std::vector<int>& per_seed : result.successes) {
    int total = 0;
    for (int w : per_seed) total += w;
    result.mean_success.push_back(
        result.trials_per_count > 0
            ? static_cast<double>(total) / result.trials_per_count
            : 0.0);
  }
  return result;
}

std::string RolloutLogToJson(const RolloutLog& log) {
  using json_util::Json;
  Json j;
  j["feature_version"] = kNnFeatureVersion;
  j["dock"] = json_util::ToJson(log.dock);
  j["success"] = log.success;
  j["failure"] = log.failure;
  Json steps = Json::array();
  for (const RolloutStep& s : log.steps) {
    Json js;
    js["step"] = s.step;
    js["features"] = s.features;
    js["demo"] = s.demo;
    js["frame"] = s.frame;
    js["action"] = json_util::ToJson(s.action.target_pose);
    js["gripper_cmd"] = s.action.gripper_cmd;
    steps.push_back(std::move(js));
  }
  j["steps"] = std::move(steps);
  return j.dump();
}

}  // namespace dockaug
