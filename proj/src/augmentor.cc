#include "dockaug/augmentor.h"

#include <algorithm>

#include "dockaug/error.h"

namespace dockaug {
namespace {

bool IsExactIdentity(const RigidTransform& t) {
  return t.delta() == Pose::Identity();
}

// Cumulative arc-length fractions of the source action positions inside a
// motion segment, measured along start, a_begin, ..., a_{end-1}[, goal].
std::vector<double> SourceFractions(const Demonstration& source,
                                    const Segment& seg, const Pose& start,
                                    const Pose* goal) {
  std::vector<double> cum;
  cum.reserve(static_cast<std::size_t>(seg.length()));
  Vec3 prev = start.position();
  double total = 0.0;
  for (std::int64_t t = seg.begin; t < seg.end; ++t) {
    const Vec3& p = source.frames[static_cast<std::size_t>(t)]
                        .action.target_pose.position();
    total += (p - prev).norm();
    cum.push_back(total);
    prev = p;
  }
  if (goal != nullptr) total += (goal->position() - prev).norm();
  if (total > 0.0) {
    for (double& c : cum) c /= total;
  } else {
    // Stationary segment: fall back to index fractions.
    const double denom = static_cast<double>(cum.size() + (goal ? 1 : 0));
    for (std::size_t i = 0; i < cum.size(); ++i) {
      cum[i] = static_cast<double>(i + 1) / denom;
    }
  }
  return cum;
}

std::size_t NearestFraction(const std::vector<double>& fractions, double f) {
  std::size_t best = 0;
  double best_d = std::abs(fractions[0] - f);
  for (std::size_t i = 1; i < fractions.size(); ++i) {
    const double d = std::abs(fractions[i] - f);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

void CheckJob(const AugmentationJob& job) {
  if (job.source == nullptr || job.parsed == nullptr || job.scene == nullptr) {
    throw Error(ErrorKind::kInvariant, "augmentation job is missing inputs");
  }
  if (job.parsed->length() != static_cast<std::int64_t>(job.source->length())) {
    throw Error(ErrorKind::kInvariant,
                "parsed trajectory does not belong to demo '" + job.source->id + "'");
  }
}

}  // namespace

std::string AugmentedDemoId(const std::string& source_id, int dock_id) {
  return source_id + "__dock" + std::to_string(dock_id);
}

GeneratedActions GenerateActions(const AugmentationJob& job,
                                 const AugmentOptions& options) {
  CheckJob(job);
  const Demonstration& src = *job.source;
  const ParsedTrajectory& parsed = *job.parsed;
  PlannerConfig planner = options.planner;
  planner.seed = job.seed;

  GeneratedActions out;
  out.paths = PlanMotionSegments(src, parsed, *job.scene, job.dock, planner,
                                 !options.unchecked);
  const std::vector<MotionEndpoints> ends =
      MotionSegmentEndpoints(src, parsed, *job.scene, job.dock);
  const double median = MedianMotionStep(src, parsed);
  const Pose src_start = src.frames.front().state.ee_pose;

  std::size_t next_path = 0;
  for (std::size_t k = 0; k < parsed.segments.size(); ++k) {
    const Segment& seg = parsed.segments[k];
    Segment emitted = seg;
    emitted.begin = static_cast<std::int64_t>(out.actions.size());
    if (seg.kind == SegmentKind::kSkill) {
      for (std::int64_t t = seg.begin; t < seg.end; ++t) {
        out.actions.push_back(src.frames[static_cast<std::size_t>(t)].action);
        out.source_frame.push_back(static_cast<std::size_t>(t));
      }
    } else {
      const MotionPath& path = out.paths[next_path];
      const MotionEndpoints& e = ends[next_path];
      ++next_path;
      const int dropped = e.skill_follows ? 2 : 1;
      const std::size_t n =
          RetimeCount(options.retime, PathLength(path.waypoints), median,
                      seg.length(), dropped);
      const std::vector<Pose> poses = Retime(path.waypoints, n);

      const Pose& start_src =
          k == 0 ? src_start
                 : src.frames[static_cast<std::size_t>(seg.begin - 1)]
                       .action.target_pose;
      const Pose* goal_src =
          e.skill_follows
              ? &src.frames[static_cast<std::size_t>(seg.end)].action.target_pose
              : nullptr;
      const std::vector<double> fractions =
          SourceFractions(src, seg, start_src, goal_src);

      const std::size_t last = e.skill_follows ? n - 2 : n - 1;
      for (std::size_t j = 1; j <= last; ++j) {
        const double f = static_cast<double>(j) / static_cast<double>(n - 1);
        const std::size_t s =
            static_cast<std::size_t>(seg.begin) + NearestFraction(fractions, f);
        out.actions.push_back({poses[j], src.frames[s].action.gripper_cmd});
        out.source_frame.push_back(s);
      }
    }
    emitted.end = static_cast<std::int64_t>(out.actions.size());
    out.segments.push_back(emitted);
  }
  return out;
}

std::vector<Label> BoundLabels(const ParsedTrajectory& parsed,
                               const Scene& scene,
                               const Demonstration& source, std::int64_t t) {
  std::vector<Label> out;
  const auto label_of = [&](const std::string& id) {
    const SceneObject* obj = scene.FindObject(id);
    if (obj != nullptr && obj->label) out.push_back(*obj->label);
  };
  const std::size_t k = parsed.SegmentIndexAt(t);
  const Segment& seg = parsed.segments[k];
  if (seg.kind == SegmentKind::kSkill) {
    label_of(seg.object_id);
  } else if (k > 0) {
    const Segment& prev = parsed.segments[k - 1];
    const DemoFrame& last = source.frames[static_cast<std::size_t>(prev.end - 1)];
    if (last.action.gripper_cmd >= 0.5) label_of(prev.object_id);
  }
  return out;
}

SynthesizedObservation SynthesizeObservation(const DemoFrame& source_frame,
                                             const Action& new_action,
                                             std::span<const Label> bound) {
  SynthesizedObservation out;
  out.cloud = source_frame.cloud;
  const PointCloud& pc = source_frame.cloud;
  std::vector<std::size_t> moving;
  bool has_arm = false;
  for (std::size_t i = 0; i < pc.size(); ++i) {
    const Label l = pc.labels[i];
    const bool arm = l == Label::Arm();
    has_arm |= arm;
    if (arm || std::find(bound.begin(), bound.end(), l) != bound.end()) {
      moving.push_back(i);
    }
  }
  if (!has_arm) {
    throw Error(ErrorKind::kLabeling,
                "frame " + std::to_string(source_frame.t) +
                    " has no arm-labeled points to edit");
  }

  const Pose& anchor = source_frame.action.target_pose;
  const RigidTransform delta = RelativeTransform(anchor, new_action.target_pose);
  if (IsExactIdentity(delta)) {
    out.state = source_frame.state;
    return out;
  }
  std::vector<Vec3> pts(moving.size());
  for (std::size_t i = 0; i < moving.size(); ++i) pts[i] = pc.points[moving[i]];
  TransformPointsInPlace(pts, delta, anchor);
  for (std::size_t i = 0; i < moving.size(); ++i) out.cloud.points[moving[i]] = pts[i];

  out.state.ee_pose = Compose(source_frame.state.ee_pose, delta.delta());
  out.state.gripper = source_frame.state.gripper;
  return out;
}

Demonstration Augment(const AugmentationJob& job, const AugmentOptions& options,
                      std::vector<Segment>* segments) {
  GeneratedActions gen = GenerateActions(job, options);
  const Demonstration& src = *job.source;

  Demonstration out;
  out.id = AugmentedDemoId(src.id, job.dock_id);
  out.docking = job.dock;
  out.scene_id = src.scene_id;
  out.provenance = Provenance::Augmented(src.id, job.dock_id);
  out.frames.resize(gen.actions.size());
  for (std::size_t i = 0; i < gen.actions.size(); ++i) {
    const std::size_t s = gen.source_frame[i];
    const std::vector<Label> bound = BoundLabels(
        *job.parsed, *job.scene, src, static_cast<std::int64_t>(s));
    SynthesizedObservation obs =
        SynthesizeObservation(src.frames[s], gen.actions[i], bound);
    DemoFrame& f = out.frames[i];
    f.t = static_cast<std::int64_t>(i);
    f.cloud = std::move(obs.cloud);
    f.state = obs.state;
    f.action = gen.actions[i];
  }

  const std::vector<Violation> violations = ValidateDemo(out, options.validation);
  if (!violations.empty()) {
    throw Error(ErrorKind::kInvariant, "augmented demo '" + out.id +
                                           "' is invalid: " +
                                           FormatViolations(violations));
  }
  if (segments != nullptr) *segments = std::move(gen.segments);
  return out;
}

}  // namespace dockaug
