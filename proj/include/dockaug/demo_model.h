#ifndef DOCKAUG_DEMO_MODEL_H_
#define DOCKAUG_DEMO_MODEL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dockaug/geometry.h"

namespace dockaug {

// Per-point semantic tag. Codes 0 and 1 are reserved for "other" and "arm";
// object labels start at kFirstObjectCode and are resolved through a
// LabelTable.
struct Label {
  std::uint8_t code = 0;

  static constexpr std::uint8_t kOtherCode = 0;
  static constexpr std::uint8_t kArmCode = 1;
  static constexpr std::uint8_t kFirstObjectCode = 2;

  static constexpr Label Other() { return Label{kOtherCode}; }
  static constexpr Label Arm() { return Label{kArmCode}; }
  static constexpr Label Object(std::uint8_t code) { return Label{code}; }

  bool is_object() const { return code >= kFirstObjectCode; }

  friend constexpr bool operator==(Label, Label) = default;
  friend constexpr auto operator<=>(Label, Label) = default;
};

struct LabelEntry {
  Label label;
  std::string name;  // "other", "arm" or "object:<id>"
};

class LabelTable {
 public:
  LabelTable();

  // Registers "object:<object_id>" with the given code. Re-registering the
  // same pair is a no-op; conflicting registrations throw.
  void AddObject(const std::string& object_id, Label label);

  std::optional<Label> Find(const std::string& name) const;
  std::optional<std::string> NameOf(Label label) const;
  const std::vector<LabelEntry>& entries() const { return entries_; }

 private:
  std::vector<LabelEntry> entries_;
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Label> labels;
  std::optional<std::vector<Eigen::Vector3f>> colors;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct RobotState {
  Pose ee_pose;
  double gripper = 0.0;  // 1 = closed command asserted
};

struct Action {
  Pose target_pose;
  double gripper_cmd = 0.0;
};

struct DemoFrame {
  std::int64_t t = 0;
  PointCloud cloud;
  RobotState state;
  Action action;
};

struct Provenance {
  enum class Kind : std::uint8_t { kSource = 0, kAugmented = 1 };

  Kind kind = Kind::kSource;
  std::string source_id;  // augmented only
  int dock_id = -1;       // augmented only

  static Provenance Source() { return {}; }
  static Provenance Augmented(std::string source_id, int dock_id) {
    return {Kind::kAugmented, std::move(source_id), dock_id};
  }

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Demonstration {
  std::string id;
  std::vector<DemoFrame> frames;
  PlanarPose docking;
  std::string scene_id;
  Provenance provenance;

  std::size_t length() const { return frames.size(); }
};

struct ValidationOptions {
  std::optional<int> point_count;  // expected N per frame
  bool binary_gripper = true;
  double quaternion_tolerance = 1e-9;
};

struct Violation {
  std::optional<std::int64_t> frame;
  std::string message;
};

// Report-style check of every Demonstration invariant. Empty means valid.
std::vector<Violation> ValidateDemo(const Demonstration& demo,
                                    const ValidationOptions& options = {});

std::string FormatViolations(const std::vector<Violation>& violations);

// Structural equality; coordinates compared exactly.
bool StructurallyEqual(const Demonstration& a, const Demonstration& b);

}  // namespace dockaug

#endif  // DOCKAUG_DEMO_MODEL_H_
