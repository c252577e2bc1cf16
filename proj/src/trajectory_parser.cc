#include "dockaug/trajectory_parser.h"

#include <limits>

#include "dockaug/error.h"
#include "dockaug/pointcloud_ops.h"

namespace dockaug {

const char* SegmentKindName(SegmentKind kind) {
  return kind == SegmentKind::kSkill ? "skill" : "motion";
}

std::size_t ParsedTrajectory::SegmentIndexAt(std::int64_t t) const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].contains(t)) return i;
  }
  throw Error(ErrorKind::kInvariant,
              "timestep " + std::to_string(t) + " outside the segment table");
}

const ObjectAnchor* ParsedTrajectory::FindObject(const std::string& id) const {
  for (const ObjectAnchor& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

const ObjectAnchor& ParsedTrajectory::TargetObject() const {
  for (const Segment& s : segments) {
    if (s.kind != SegmentKind::kSkill) continue;
    if (const ObjectAnchor* o = FindObject(s.object_id)) return *o;
  }
  throw Error(ErrorKind::kNoSkillSegment, "parsed trajectory has no skill target");
}

bool ObjectRadiusCheck(const Pose& ee, const Vec3& object_centroid,
                       double threshold) {
  return (ee.position() - object_centroid).norm() < threshold;
}

std::vector<Segment> DebounceRuns(const std::vector<SegmentKind>& kinds,
                                  int min_seg_len) {
  std::vector<Segment> runs;
  for (std::size_t t = 0; t < kinds.size(); ++t) {
    const auto ti = static_cast<std::int64_t>(t);
    if (!runs.empty() && runs.back().kind == kinds[t]) {
      runs.back().end = ti + 1;
    } else {
      runs.push_back({kinds[t], ti, ti + 1, {}});
    }
  }
  std::vector<Segment> out;
  for (const Segment& r : runs) {
    if (out.empty()) {
      out.push_back(r);
    } else if (r.length() < min_seg_len || out.back().kind == r.kind) {
      out.back().end = r.end;
    } else {
      out.push_back(r);
    }
  }
  if (out.size() >= 2 && out[0].length() < min_seg_len) {
    out[1].begin = 0;
    out.erase(out.begin());
  }
  return out;
}

ParsedTrajectory Parse(const Demonstration& demo, const Scene& scene,
                       const ParserConfig& config) {
  if (demo.frames.empty()) {
    throw Error(ErrorKind::kInvariant, "cannot parse an empty demonstration");
  }
  ParsedTrajectory parsed;
  parsed.threshold = config.threshold;
  parsed.min_seg_len = config.min_seg_len;
  const PointCloud& first = demo.frames.front().cloud;
  for (const SceneObject& obj : scene.objects) {
    if (!obj.label) continue;
    const PointCloud cluster = ExtractCluster(first, *obj.label);
    if (cluster.empty()) continue;
    parsed.objects.push_back({obj.id, *obj.label, Centroid(cluster)});
  }
  if (parsed.objects.empty()) {
    throw Error(ErrorKind::kEmptyScene,
                "scene '" + scene.id +
                    "' has no labeled object visible in the first frame");
  }

  std::vector<SegmentKind> kinds(demo.frames.size());
  std::vector<std::size_t> nearest(demo.frames.size());
  bool any_skill = false;
  for (std::size_t t = 0; t < demo.frames.size(); ++t) {
    const Pose& ee = demo.frames[t].action.target_pose;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < parsed.objects.size(); ++k) {
      const double d = (ee.position() - parsed.objects[k].centroid).norm();
      if (d < best) {
        best = d;
        nearest[t] = k;
      }
    }
    const bool skill =
        ObjectRadiusCheck(ee, parsed.objects[nearest[t]].centroid,
                          config.threshold);
    kinds[t] = skill ? SegmentKind::kSkill : SegmentKind::kMotion;
    any_skill |= skill;
  }
  if (!any_skill) {
    throw Error(ErrorKind::kNoSkillSegment,
                "no skill segment: end-effector never comes within " +
                    std::to_string(config.threshold) + " m of an object in '" +
                    demo.id + "'");
  }
  parsed.segments = DebounceRuns(kinds, config.min_seg_len);
  bool kept_skill = false;
  for (Segment& s : parsed.segments) {
    if (s.kind != SegmentKind::kSkill) continue;
    kept_skill = true;
    s.object_id = parsed.objects[nearest[static_cast<std::size_t>(s.begin)]].id;
  }
  if (!kept_skill) {
    throw Error(ErrorKind::kNoSkillSegment,
                "no skill segment survives debouncing in '" + demo.id + "'");
  }
  return parsed;
}

void CheckSegmentTable(const std::vector<Segment>& segments,
                       std::int64_t length) {
  std::int64_t cursor = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (s.begin != cursor || s.end <= s.begin) {
      throw Error(ErrorKind::kInvariant,
                  "segment " + std::to_string(i) + " does not tile the timeline");
    }
    if (i > 0 && segments[i - 1].kind == s.kind) {
      throw Error(ErrorKind::kInvariant,
                  "segments " + std::to_string(i - 1) + " and " +
                      std::to_string(i) + " share a kind");
    }
    cursor = s.end;
  }
  if (cursor != length) {
    throw Error(ErrorKind::kInvariant, "segment table covers " +
                                           std::to_string(cursor) + " of " +
                                           std::to_string(length) + " frames");
  }
}

}  // namespace dockaug
