#ifndef DOCKAUG_AUGMENTOR_H_
#define DOCKAUG_AUGMENTOR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "dockaug/demo_model.h"
#include "dockaug/motion_replanner.h"
#include "dockaug/scene.h"
#include "dockaug/trajectory_parser.h"

namespace dockaug {

struct AugmentOptions {
  PlannerConfig planner;
  RetimePolicy retime;
  // Skips the collision and workspace tests of the replanner and connects
  // motion segments with straight lines. Only for negative controls.
  bool unchecked = false;
  ValidationOptions validation;
};

// Inputs are borrowed and must outlive the job.
struct AugmentationJob {
  const Demonstration* source = nullptr;
  const ParsedTrajectory* parsed = nullptr;
  const Scene* scene = nullptr;
  PlanarPose dock;
  int dock_id = 0;
  std::uint64_t seed = 0;
};

struct GeneratedActions {
  std::vector<Action> actions;
  std::vector<Segment> segments;        // segment table of the output
  std::vector<std::size_t> source_frame;  // paired source frame per output frame
  std::vector<MotionPath> paths;        // replanned motion paths
};

// Skill frames keep the source actions bit for bit. Motion frames come from
// the retimed replanned path with its splice endpoints dropped, and borrow
// the gripper command of the source frame at the nearest arc-length fraction.
GeneratedActions GenerateActions(const AugmentationJob& job,
                                 const AugmentOptions& options = {});

// Labels of the objects that move with the end-effector at source frame
// `t`: the skill's own object inside a skill segment, and an object still
// held (command 1) when the previous skill ended.
std::vector<Label> BoundLabels(const ParsedTrajectory& parsed,
                               const Scene& scene,
                               const Demonstration& source, std::int64_t t);

struct SynthesizedObservation {
  PointCloud cloud;
  RobotState state;
};

// Moves the arm points and the bound object points by the relative transform
// between the source and new action poses, about the source action frame,
// and adapts the observed end-effector pose the same way. Point order is
// kept. Throws a labeling error if the source cloud has no arm points.
SynthesizedObservation SynthesizeObservation(const DemoFrame& source_frame,
                                             const Action& new_action,
                                             std::span<const Label> bound);

// Full augmented demonstration, validated before return. `segments`, when
// given, receives the segment table of the output.
Demonstration Augment(const AugmentationJob& job,
                      const AugmentOptions& options = {},
                      std::vector<Segment>* segments = nullptr);

std::string AugmentedDemoId(const std::string& source_id, int dock_id);

}  // namespace dockaug

#endif  // DOCKAUG_AUGMENTOR_H_
