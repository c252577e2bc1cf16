#ifndef DOCKAUG_TRAJECTORY_PARSER_H_
#define DOCKAUG_TRAJECTORY_PARSER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dockaug/demo_model.h"
#include "dockaug/scene.h"

namespace dockaug {

enum class SegmentKind { kMotion, kSkill };

const char* SegmentKindName(SegmentKind kind);

// Half-open timestep span [begin, end).
struct Segment {
  SegmentKind kind = SegmentKind::kMotion;
  std::int64_t begin = 0;
  std::int64_t end = 0;
  std::string object_id;  // skill segments only

  std::int64_t length() const { return end - begin; }
  bool contains(std::int64_t t) const { return t >= begin && t < end; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct ObjectAnchor {
  std::string id;
  Label label;
  Vec3 centroid;  // from the first frame's labeled points
};

struct ParsedTrajectory {
  std::vector<Segment> segments;
  double threshold = 0.1;
  int min_seg_len = 3;
  std::vector<ObjectAnchor> objects;

  std::int64_t length() const {
    return segments.empty() ? 0 : segments.back().end;
  }
  // Index of the segment containing t.
  std::size_t SegmentIndexAt(std::int64_t t) const;
  const ObjectAnchor* FindObject(const std::string& id) const;
  // First skill segment's object.
  const ObjectAnchor& TargetObject() const;
};

struct ParserConfig {
  double threshold = 0.1;  // meters
  int min_seg_len = 3;     // timesteps
};

// True iff the end-effector lies strictly inside the object sphere.
bool ObjectRadiusCheck(const Pose& ee, const Vec3& object_centroid,
                       double threshold);

// Merges per-frame kinds into maximal runs; runs shorter than min_seg_len are
// absorbed into their predecessor (a short leading run into its successor).
std::vector<Segment> DebounceRuns(const std::vector<SegmentKind>& kinds,
                                  int min_seg_len);

// Splits a demonstration into alternating motion and skill segments using the
// distance from the commanded end-effector position to each labeled object's
// first-frame centroid.
ParsedTrajectory Parse(const Demonstration& demo, const Scene& scene,
                       const ParserConfig& config = {});

// Throws unless segments tile [0, length) and kinds alternate.
void CheckSegmentTable(const std::vector<Segment>& segments,
                       std::int64_t length);

}  // namespace dockaug

#endif  // DOCKAUG_TRAJECTORY_PARSER_H_
