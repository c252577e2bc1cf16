#include "dockaug/demo_model.h"

#include <cmath>
#include <sstream>

#include "dockaug/error.h"

namespace dockaug {

LabelTable::LabelTable() {
  entries_.push_back({Label::Other(), "other"});
  entries_.push_back({Label::Arm(), "arm"});
}

void LabelTable::AddObject(const std::string& object_id, Label label) {
  if (!label.is_object()) {
    throw Error(ErrorKind::kLabeling,
                "object '" + object_id + "' uses a reserved label code " +
                    std::to_string(label.code));
  }
  const std::string name = "object:" + object_id;
  for (const LabelEntry& e : entries_) {
    if (e.name == name && e.label == label) return;
    if (e.name == name || e.label == label) {
      throw Error(ErrorKind::kLabeling,
                  "conflicting label registration for '" + name + "' code " +
                      std::to_string(label.code));
    }
  }
  entries_.push_back({label, name});
}

std::optional<Label> LabelTable::Find(const std::string& name) const {
  for (const LabelEntry& e : entries_) {
    if (e.name == name) return e.label;
  }
  return std::nullopt;
}

std::optional<std::string> LabelTable::NameOf(Label label) const {
  for (const LabelEntry& e : entries_) {
    if (e.label == label) return e.name;
  }
  return std::nullopt;
}

namespace {

bool IsBinary(double v) { return v == 0.0 || v == 1.0; }

void CheckPose(const Pose& pose, const char* what, std::int64_t frame,
               double tolerance, std::vector<Violation>& out) {
  const double norm = pose.orientation().norm();
  if (std::abs(norm - 1.0) > tolerance) {
    std::ostringstream msg;
    msg.precision(12);
    msg << what << " quaternion norm " << norm << " is not unit";
    out.push_back({frame, msg.str()});
  }
  if (!pose.position().allFinite()) {
    out.push_back({frame, std::string(what) + " position is not finite"});
  }
}

}  // namespace

std::vector<Violation> ValidateDemo(const Demonstration& demo,
                                    const ValidationOptions& options) {
  std::vector<Violation> out;
  if (demo.frames.size() < 2) {
    out.push_back({std::nullopt, "demonstration has " +
                                     std::to_string(demo.frames.size()) +
                                     " frames; at least 2 required"});
  }
  if (demo.scene_id.empty()) {
    out.push_back({std::nullopt, "scene_id is empty"});
  }
  if (demo.provenance.kind == Provenance::Kind::kAugmented &&
      (demo.provenance.source_id.empty() || demo.provenance.dock_id < 0)) {
    out.push_back({std::nullopt, "augmented provenance is incomplete"});
  }
  for (std::size_t i = 0; i < demo.frames.size(); ++i) {
    const DemoFrame& f = demo.frames[i];
    if (f.t != static_cast<std::int64_t>(i)) {
      out.push_back({f.t, "timestep " + std::to_string(f.t) +
                              " at position " + std::to_string(i) +
                              " breaks contiguity"});
    }
    const PointCloud& pc = f.cloud;
    if (pc.labels.size() != pc.points.size()) {
      out.push_back({f.t, "labels length " + std::to_string(pc.labels.size()) +
                              " != points length " +
                              std::to_string(pc.points.size())});
    }
    if (pc.colors && pc.colors->size() != pc.points.size()) {
      out.push_back({f.t, "colors length " + std::to_string(pc.colors->size()) +
                              " != points length " +
                              std::to_string(pc.points.size())});
    }
    if (options.point_count &&
        static_cast<int>(pc.points.size()) != *options.point_count) {
      out.push_back({f.t, "frame has " + std::to_string(pc.points.size()) +
                              " points; configured " +
                              std::to_string(*options.point_count)});
    }
    for (const Vec3& p : pc.points) {
      if (!p.allFinite()) {
        out.push_back({f.t, "non-finite point coordinate"});
        break;
      }
    }
    CheckPose(f.state.ee_pose, "state", f.t, options.quaternion_tolerance, out);
    CheckPose(f.action.target_pose, "action", f.t,
              options.quaternion_tolerance, out);
    for (double g : {f.state.gripper, f.action.gripper_cmd}) {
      if (!(g >= 0.0 && g <= 1.0)) {
        out.push_back({f.t, "gripper value " + std::to_string(g) +
                                " outside [0, 1]"});
      } else if (options.binary_gripper && !IsBinary(g)) {
        out.push_back({f.t, "gripper value " + std::to_string(g) +
                                " is not binary"});
      }
    }
  }
  return out;
}

std::string FormatViolations(const std::vector<Violation>& violations) {
  std::ostringstream out;
  for (const Violation& v : violations) {
    if (v.frame) out << "frame " << *v.frame << ": ";
    out << v.message << "\n";
  }
  return out.str();
}

namespace {

bool SamePose(const Pose& a, const Pose& b) { return a == b; }

bool SameCloud(const PointCloud& a, const PointCloud& b) {
  return a.points == b.points && a.labels == b.labels &&
         a.colors.has_value() == b.colors.has_value() &&
         (!a.colors || *a.colors == *b.colors);
}

}  // namespace

bool StructurallyEqual(const Demonstration& a, const Demonstration& b) {
  if (a.id != b.id || a.scene_id != b.scene_id || !(a.docking == b.docking) ||
      !(a.provenance == b.provenance) || a.frames.size() != b.frames.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    const DemoFrame& fa = a.frames[i];
    const DemoFrame& fb = b.frames[i];
    if (fa.t != fb.t || !SameCloud(fa.cloud, fb.cloud) ||
        !SamePose(fa.state.ee_pose, fb.state.ee_pose) ||
        fa.state.gripper != fb.state.gripper ||
        !SamePose(fa.action.target_pose, fb.action.target_pose) ||
        fa.action.gripper_cmd != fb.action.gripper_cmd) {
      return false;
    }
  }
  return true;
}

}  // namespace dockaug
