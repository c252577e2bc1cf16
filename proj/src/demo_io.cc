#include "dockaug/demo_io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dockaug/error.h"
#include "json_util.h"

namespace dockaug {

static_assert(std::endian::native == std::endian::little,
              "demo serialization assumes a little-endian host");

namespace {

class Writer {
 public:
  template <typename T>
  void Put(T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    bytes_.append(buf, sizeof(T));
  }
  void PutString(const std::string& s) {
    Put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes_.append(s);
  }
  void PutPose(const Pose& p) {
    for (int i = 0; i < 3; ++i) Put<double>(p.position()[i]);
    const Quat& q = p.orientation();
    Put<double>(q.w());
    Put<double>(q.x());
    Put<double>(q.y());
    Put<double>(q.z());
  }
  std::size_t size() const { return bytes_.size(); }
  std::string Take() { return std::move(bytes_); }

 private:
  std::string bytes_;
};

class Reader {
 public:
  Reader(const std::string& bytes, std::string origin)
      : bytes_(bytes), origin_(std::move(origin)) {}

  template <typename T>
  T Get(const std::string& field) {
    if (pos_ + sizeof(T) > bytes_.size()) Fail(field, "truncated");
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string GetString(const std::string& field) {
    const auto n = Get<std::uint32_t>(field + ".length");
    if (pos_ + n > bytes_.size()) Fail(field, "truncated");
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Pose GetPose(const std::string& field, std::int64_t frame) {
    Vec3 pos;
    for (int i = 0; i < 3; ++i) pos[i] = Get<double>(field);
    const double w = Get<double>(field), x = Get<double>(field),
                 y = Get<double>(field), z = Get<double>(field);
    const double norm = std::sqrt(w * w + x * x + y * y + z * z);
    if (!pos.allFinite() || !std::isfinite(norm)) {
      Fail(field, "non-finite value");
    }
    if (std::abs(norm - 1.0) > 1e-9) {
      std::ostringstream msg;
      msg.precision(12);
      msg << origin_ << ": frame " << frame << ": " << field
          << " quaternion norm " << norm << " is not unit";
      throw Error(ErrorKind::kInvariant, msg.str());
    }
    return Pose(pos, Quat(w, x, y, z));
  }
  void Skip(std::size_t n, const std::string& field) {
    if (pos_ + n > bytes_.size()) Fail(field, "truncated");
    pos_ += n;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }
  [[noreturn]] void Fail(const std::string& field, const std::string& why) const {
    throw Error(ErrorKind::kFormat,
                origin_ + ": field '" + field + "': " + why);
  }

 private:
  const std::string& bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

SerializedDemo SerializeDemo(const Demonstration& demo) {
  Writer w;
  for (char c : kDemoMagic) w.Put<char>(c);
  w.Put<std::uint32_t>(kDemoFormatVersion);
  w.PutString(demo.id);
  w.PutString(demo.scene_id);
  w.Put<double>(demo.docking.x());
  w.Put<double>(demo.docking.y());
  w.Put<double>(demo.docking.yaw());
  w.Put<std::uint8_t>(static_cast<std::uint8_t>(demo.provenance.kind));
  w.PutString(demo.provenance.source_id);
  w.Put<std::int32_t>(demo.provenance.dock_id);
  w.Put<std::uint32_t>(static_cast<std::uint32_t>(demo.frames.size()));
  bool has_colors = false;
  for (const DemoFrame& f : demo.frames) has_colors |= f.cloud.colors.has_value();
  w.Put<std::uint8_t>(has_colors ? 1 : 0);

  SerializedDemo out;
  out.frame_offsets.reserve(demo.frames.size());
  for (const DemoFrame& f : demo.frames) {
    out.frame_offsets.push_back(w.size());
    const PointCloud& pc = f.cloud;
    const std::size_t n_colors = pc.colors ? pc.colors->size() : 0;
    w.Put<std::int64_t>(f.t);
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(pc.points.size()));
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(pc.labels.size()));
    w.Put<std::uint32_t>(static_cast<std::uint32_t>(n_colors));
    w.PutPose(f.state.ee_pose);
    w.Put<double>(f.state.gripper);
    w.PutPose(f.action.target_pose);
    w.Put<double>(f.action.gripper_cmd);
    for (const Vec3& p : pc.points) {
      w.Put<float>(static_cast<float>(p.x()));
      w.Put<float>(static_cast<float>(p.y()));
      w.Put<float>(static_cast<float>(p.z()));
    }
    for (Label l : pc.labels) w.Put<std::uint8_t>(l.code);
    if (pc.colors) {
      for (const Eigen::Vector3f& c : *pc.colors) {
        w.Put<float>(c.x());
        w.Put<float>(c.y());
        w.Put<float>(c.z());
      }
    }
  }
  out.bytes = w.Take();
  return out;
}

Demonstration DeserializeDemo(const std::string& bytes,
                              const std::string& origin) {
  Reader r(bytes, origin);
  char magic[4];
  for (char& c : magic) c = r.Get<char>("magic");
  if (std::memcmp(magic, kDemoMagic, 4) != 0) r.Fail("magic", "bad magic");
  const auto version = r.Get<std::uint32_t>("version");
  if (version != kDemoFormatVersion) {
    r.Fail("version", "unsupported version " + std::to_string(version));
  }
  Demonstration d;
  d.id = r.GetString("id");
  d.scene_id = r.GetString("scene_id");
  const double x = r.Get<double>("dock.x");
  const double y = r.Get<double>("dock.y");
  const double yaw = r.Get<double>("dock.yaw");
  d.docking = PlanarPose(x, y, yaw);
  const auto kind = r.Get<std::uint8_t>("provenance.kind");
  if (kind > 1) r.Fail("provenance.kind", "unknown kind " + std::to_string(kind));
  d.provenance.kind = static_cast<Provenance::Kind>(kind);
  d.provenance.source_id = r.GetString("provenance.source_id");
  d.provenance.dock_id = r.Get<std::int32_t>("provenance.dock_id");
  const auto n_frames = r.Get<std::uint32_t>("n_frames");
  const bool has_colors = r.Get<std::uint8_t>("has_colors") != 0;

  d.frames.reserve(n_frames);
  for (std::uint32_t i = 0; i < n_frames; ++i) {
    const std::string fp = "frames[" + std::to_string(i) + "]";
    DemoFrame f;
    f.t = r.Get<std::int64_t>(fp + ".t");
    const auto n_points = r.Get<std::uint32_t>(fp + ".n_points");
    const auto n_labels = r.Get<std::uint32_t>(fp + ".n_labels");
    const auto n_colors = r.Get<std::uint32_t>(fp + ".n_colors");
    if (n_labels != n_points) {
      r.Fail(fp + ".labels", "length " + std::to_string(n_labels) +
                                 " does not match " + std::to_string(n_points) +
                                 " points");
    }
    if (n_colors != 0 && n_colors != n_points) {
      r.Fail(fp + ".colors", "length " + std::to_string(n_colors) +
                                 " does not match " + std::to_string(n_points) +
                                 " points");
    }
    if (n_colors != 0 && !has_colors) {
      r.Fail(fp + ".colors", "colors present but header has_colors is 0");
    }
    f.state.ee_pose = r.GetPose(fp + ".state.ee_pose", f.t);
    f.state.gripper = r.Get<double>(fp + ".state.gripper");
    f.action.target_pose = r.GetPose(fp + ".action.target_pose", f.t);
    f.action.gripper_cmd = r.Get<double>(fp + ".action.gripper_cmd");
    f.cloud.points.resize(n_points);
    for (Vec3& p : f.cloud.points) {
      const float px = r.Get<float>(fp + ".points");
      const float py = r.Get<float>(fp + ".points");
      const float pz = r.Get<float>(fp + ".points");
      p = Vec3(px, py, pz);
    }
    f.cloud.labels.resize(n_labels);
    for (Label& l : f.cloud.labels) l.code = r.Get<std::uint8_t>(fp + ".labels");
    if (n_colors > 0) {
      auto& colors = f.cloud.colors.emplace(n_colors);
      for (Eigen::Vector3f& c : colors) {
        c.x() = r.Get<float>(fp + ".colors");
        c.y() = r.Get<float>(fp + ".colors");
        c.z() = r.Get<float>(fp + ".colors");
      }
    }
    d.frames.push_back(std::move(f));
  }
  if (!r.done()) r.Fail("trailer", "unexpected bytes after last frame");

  ValidationOptions opts;
  opts.binary_gripper = false;
  const std::vector<Violation> violations = ValidateDemo(d, opts);
  if (!violations.empty()) {
    const Violation& v = violations.front();
    throw Error(ErrorKind::kInvariant,
                origin + ": " +
                    (v.frame ? "frame " + std::to_string(*v.frame) + ": " : "") +
                    v.message);
  }
  return d;
}

std::vector<std::uint64_t> WriteDemo(const Demonstration& demo,
                                     const std::filesystem::path& path) {
  SerializedDemo s = SerializeDemo(demo);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(s.bytes.data(), static_cast<std::streamsize>(s.bytes.size()));
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
  return s.frame_offsets;
}

Demonstration ReadDemo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open demo file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return DeserializeDemo(buf.str(), path.string());
}

const DemoEntry* Manifest::Find(const std::string& demo_id) const {
  for (const DemoEntry& e : demos) {
    if (e.id == demo_id) return &e;
  }
  return nullptr;
}

namespace {

using json_util::At;
using json_util::Json;

Json ProvenanceToJson(const Provenance& p) {
  Json j;
  if (p.kind == Provenance::Kind::kSource) {
    j["kind"] = "source";
  } else {
    j["kind"] = "augmented";
    j["source_id"] = p.source_id;
    j["dock_id"] = p.dock_id;
  }
  return j;
}

Provenance ProvenanceFromJson(const Json& j, const std::string& where) {
  const std::string kind = At(j, "kind", where + ".").get<std::string>();
  if (kind == "source") return Provenance::Source();
  if (kind == "augmented") {
    return Provenance::Augmented(
        At(j, "source_id", where + ".").get<std::string>(),
        At(j, "dock_id", where + ".").get<int>());
  }
  throw Error(ErrorKind::kFormat, "field '" + where + ".kind' has unknown value '" + kind + "'");
}

}  // namespace

std::string ManifestToJson(const Manifest& m) {
  Json j;
  j["format"] = "dockaug.dataset";
  j["version"] = 1;
  j["point_count"] = m.point_count;
  j["binary_gripper"] = m.binary_gripper;
  j["fps_seed"] = m.fps_seed;
  Json table = Json::array();
  for (const LabelEntry& e : m.labels.entries()) {
    Json je;
    je["code"] = e.label.code;
    je["name"] = e.name;
    table.push_back(std::move(je));
  }
  j["label_table"] = std::move(table);
  j["scenes"] = m.scenes;
  Json demos = Json::array();
  for (const DemoEntry& e : m.demos) {
    Json jd;
    jd["id"] = e.id;
    jd["file"] = e.file;
    jd["scene_id"] = e.scene_id;
    jd["dock"] = json_util::ToJson(e.dock);
    jd["provenance"] = ProvenanceToJson(e.provenance);
    jd["n_frames"] = e.n_frames;
    jd["frame_offsets"] = e.frame_offsets;
    Json segs = Json::array();
    for (const Segment& s : e.segments) {
      Json js;
      js["kind"] = SegmentKindName(s.kind);
      js["begin"] = s.begin;
      js["end"] = s.end;
      js["object"] = s.object_id;
      segs.push_back(std::move(js));
    }
    jd["segments"] = std::move(segs);
    demos.push_back(std::move(jd));
  }
  j["demos"] = std::move(demos);
  j["feasibility"] = Json::parse(m.feasibility_json);
  j["errors"] = m.errors;
  return j.dump(1) + "\n";
}

Manifest ManifestFromJson(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kFormat, std::string("manifest is not valid JSON: ") + e.what());
  }
  Manifest m;
  try {
    if (At(j, "format", "").get<std::string>() != "dockaug.dataset") {
      throw Error(ErrorKind::kFormat, "field 'format' is not 'dockaug.dataset'");
    }
    m.point_count = At(j, "point_count", "").get<int>();
    m.binary_gripper = At(j, "binary_gripper", "").get<bool>();
    m.fps_seed = At(j, "fps_seed", "").get<std::uint64_t>();
    for (const Json& e : At(j, "label_table", "")) {
      const auto code = At(e, "code", "label_table[].").get<std::uint8_t>();
      const std::string name = At(e, "name", "label_table[].").get<std::string>();
      if (code == Label::kOtherCode || code == Label::kArmCode) {
        const char* expected = code == Label::kOtherCode ? "other" : "arm";
        if (name != expected) {
          throw Error(ErrorKind::kFormat, "label_table: code " +
                                              std::to_string(code) +
                                              " must be '" + expected + "'");
        }
        continue;
      }
      if (name.rfind("object:", 0) != 0) {
        throw Error(ErrorKind::kFormat, "label_table: bad name '" + name + "'");
      }
      m.labels.AddObject(name.substr(7), Label{code});
    }
    m.scenes = At(j, "scenes", "").get<std::vector<std::string>>();
    const Json& demos = At(j, "demos", "");
    for (std::size_t i = 0; i < demos.size(); ++i) {
      const std::string where = "demos[" + std::to_string(i) + "]";
      const Json& jd = demos[i];
      DemoEntry e;
      e.id = At(jd, "id", where + ".").get<std::string>();
      e.file = At(jd, "file", where + ".").get<std::string>();
      e.scene_id = At(jd, "scene_id", where + ".").get<std::string>();
      e.dock = json_util::PlanarFrom(At(jd, "dock", where + "."), where + ".dock");
      e.provenance = ProvenanceFromJson(At(jd, "provenance", where + "."),
                                        where + ".provenance");
      e.n_frames = At(jd, "n_frames", where + ".").get<std::int64_t>();
      e.frame_offsets =
          At(jd, "frame_offsets", where + ".").get<std::vector<std::uint64_t>>();
      for (const Json& js : At(jd, "segments", where + ".")) {
        Segment s;
        const std::string kind = At(js, "kind", where + ".segments[].").get<std::string>();
        s.kind = kind == "skill" ? SegmentKind::kSkill : SegmentKind::kMotion;
        s.begin = At(js, "begin", where + ".segments[].").get<std::int64_t>();
        s.end = At(js, "end", where + ".segments[].").get<std::int64_t>();
        s.object_id = At(js, "object", where + ".segments[].").get<std::string>();
        e.segments.push_back(std::move(s));
      }
      m.demos.push_back(std::move(e));
    }
    if (j.contains("feasibility")) m.feasibility_json = j["feasibility"].dump();
    if (j.contains("errors")) m.errors = j["errors"].get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("manifest: ") + e.what());
  }
  return m;
}

void WriteManifest(const Manifest& manifest, const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / kManifestFile;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << ManifestToJson(manifest);
  if (!out) throw Error(ErrorKind::kIo, "failed writing " + path.string());
}

Manifest ReadManifest(const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / kManifestFile;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "missing manifest " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ManifestFromJson(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::filesystem::path SceneFilePath(const std::filesystem::path& dir,
                                    const std::string& scene_id) {
  return dir / "scenes" / (scene_id + ".json");
}

std::filesystem::path DemoFilePath(const std::filesystem::path& dir,
                                   const std::string& demo_id) {
  return dir / "demos" / (demo_id + ".bin");
}

DemoEntry WriteDatasetDemo(const std::filesystem::path& dir,
                           const Demonstration& demo,
                           std::vector<Segment> segments) {
  std::filesystem::create_directories(dir / "demos");
  DemoEntry e;
  e.id = demo.id;
  e.file = "demos/" + demo.id + ".bin";
  e.scene_id = demo.scene_id;
  e.dock = demo.docking;
  e.provenance = demo.provenance;
  e.n_frames = static_cast<std::int64_t>(demo.frames.size());
  e.frame_offsets = WriteDemo(demo, dir / e.file);
  e.segments = std::move(segments);
  return e;
}

Demonstration ReadDatasetDemo(const std::filesystem::path& dir,
                              const DemoEntry& entry) {
  Demonstration d = ReadDemo(dir / entry.file);
  if (d.id != entry.id || d.scene_id != entry.scene_id ||
      static_cast<std::int64_t>(d.frames.size()) != entry.n_frames) {
    throw Error(ErrorKind::kFormat,
                (dir / entry.file).string() + ": header disagrees with manifest entry '" +
                    entry.id + "'");
  }
  return d;
}

}  // namespace dockaug
