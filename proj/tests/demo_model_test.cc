#include "dockaug/demo_model.h"

#include <gtest/gtest.h>

#include "dockaug/error.h"
#include "test_util.h"

namespace dockaug {
namespace {

Demonstration Valid() {
  return testing::SyntheticDemo({Vec3(0, 0, 1), Vec3(0, 0, 0.9), Vec3(0, 0, 0.8)},
                                Vec3(0, 0, 0.7), {0.0, 1.0, 1.0});
}

TEST(ValidateDemo, AcceptsSyntheticDemo) {
  EXPECT_TRUE(ValidateDemo(Valid()).empty());
}

TEST(ValidateDemo, FlagsBrokenContiguity) {
  Demonstration d = Valid();
  d.frames[2].t = 5;
  const auto v = ValidateDemo(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].frame, 5);
}

TEST(ValidateDemo, FlagsLabelLengthMismatch) {
  Demonstration d = Valid();
  d.frames[1].cloud.labels.pop_back();
  const auto v = ValidateDemo(d);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].frame, 1);
}

TEST(ValidateDemo, FlagsPointCount) {
  ValidationOptions o;
  o.point_count = 9;
  EXPECT_EQ(ValidateDemo(Valid(), o).size(), 3u);
}

TEST(ValidateDemo, BinaryGripperFlag) {
  Demonstration d = Valid();
  d.frames[1].action.gripper_cmd = 0.5;
  EXPECT_FALSE(ValidateDemo(d).empty());
  ValidationOptions continuous;
  continuous.binary_gripper = false;
  EXPECT_TRUE(ValidateDemo(d, continuous).empty());
  d.frames[1].action.gripper_cmd = 1.5;
  EXPECT_FALSE(ValidateDemo(d, continuous).empty());
}

TEST(ValidateDemo, FlagsNonFinitePoints) {
  Demonstration d = Valid();
  d.frames[0].cloud.points[0].x() = std::nan("");
  EXPECT_FALSE(ValidateDemo(d).empty());
}

TEST(ValidateDemo, FlagsShortDemoAndIncompleteProvenance) {
  Demonstration d = Valid();
  d.frames.resize(1);
  d.provenance = Provenance::Augmented("", -1);
  EXPECT_EQ(ValidateDemo(d).size(), 2u);
}

TEST(LabelTable, ReservedEntriesAndConflicts) {
  LabelTable t;
  EXPECT_EQ(t.Find("arm"), Label::Arm());
  EXPECT_EQ(t.Find("other"), Label::Other());
  t.AddObject("cube", Label::Object(2));
  t.AddObject("cube", Label::Object(2));
  EXPECT_EQ(t.NameOf(Label::Object(2)), "object:cube");
  EXPECT_THROW(t.AddObject("cube", Label::Object(3)), Error);
  EXPECT_THROW(t.AddObject("bin", Label::Object(2)), Error);
  EXPECT_THROW(t.AddObject("bin", Label::Arm()), Error);
}

TEST(StructurallyEqual, DetectsSingleBitChange) {
  const Demonstration a = Valid();
  Demonstration b = a;
  EXPECT_TRUE(StructurallyEqual(a, b));
  b.frames[1].cloud.points[2].z() = std::nextafter(b.frames[1].cloud.points[2].z(), 1.0);
  EXPECT_FALSE(StructurallyEqual(a, b));
}

}  // namespace
}  // namespace dockaug
