#include "dockaug/cli.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "dockaug/nn_policy.h"
#include "dockaug/pipeline.h"
#include "dockaug/random.h"
#include "dockaug/sim_harness.h"
#include "json_util.h"
#include "report_json.h"

namespace dockaug {
namespace {

namespace fs = std::filesystem;
using json_util::Json;

// Effective settings. Keys double as --config file keys and, with '_'
// spelled '-', as flag names.
Json DefaultConfig() {
  Json j;
  j["dataset"] = "";
  j["out"] = "";
  j["train"] = "";
  j["demo"] = "";
  j["docks"] = 4;
  j["test_docks"] = "";
  j["range"] = "0.8:1.2";
  j["threshold"] = 0.1;
  j["min_seg_len"] = 3;
  j["points"] = 1024;
  j["seed"] = 0;
  j["jobs"] = 1;
  j["retime"] = "match";
  j["report"] = "text";
  j["yaw_jitter"] = 0.35;
  j["max_attempts"] = 200;
  j["max_step"] = 0.02;
  j["clearance"] = 0.03;
  j["pick"] = 1;
  j["place"] = 1;
  return j;
}

Error ConfigError(const std::string& msg) { return Error(ErrorKind::kConfig, msg); }

// Coerces `value` to the type of the default for `key`.
Json Coerce(const Json& defaults, const std::string& key, const Json& value) {
  if (!defaults.contains(key)) throw ConfigError("unknown setting '" + key + "'");
  const Json& d = defaults.at(key);
  if (value.is_string() && !d.is_string()) {
    const std::string s = value.get<std::string>();
    try {
      std::size_t used = 0;
      if (d.is_number_integer()) {
        const long long v = std::stoll(s, &used);
        if (used == s.size()) return v;
      } else {
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
      }
    } catch (const std::exception&) {
    }
    throw ConfigError("setting '" + key + "' expects a number, got '" + s + "'");
  }
  if (d.is_string() != value.is_string() ||
      (d.is_number_integer() && !value.is_number_integer()) ||
      (d.is_number_float() && !value.is_number())) {
    throw ConfigError("setting '" + key + "' has the wrong type");
  }
  if (d.is_number_float()) return value.get<double>();
  return value;
}

struct RunConfig {
  Json values;

  std::string Str(const char* key) const { return values.at(key).get<std::string>(); }
  double Num(const char* key) const { return values.at(key).get<double>(); }
  long long Int(const char* key) const { return values.at(key).get<long long>(); }

  fs::path RequirePath(const char* key, const char* flag) const {
    const std::string p = Str(key);
    if (p.empty()) throw ConfigError(std::string(flag) + " is required");
    return p;
  }
  bool JsonReport() const { return Str("report") == "json"; }

  void Validate() const {
    const std::string report = Str("report");
    if (report != "text" && report != "json") {
      throw ConfigError("--report must be text or json");
    }
    const long long points = Int("points");
    if (points != 1024 && points != 2048) throw ConfigError("--points must be 1024 or 2048");
    if (Int("jobs") < 1) throw ConfigError("--jobs must be at least 1");
    if (Int("docks") < 1) throw ConfigError("--docks must be at least 1");
    if (!(Num("threshold") > 0.0)) throw ConfigError("--threshold must be positive");
    if (Int("min_seg_len") < 1) throw ConfigError("--min-seg-len must be at least 1");
    if (Int("pick") < 0 || Int("place") < 0) throw ConfigError("demo counts must be >= 0");
    if (Int("seed") < 0) throw ConfigError("--seed must be non-negative");
    Range();
    RetimePolicy::FromString(Str("retime"));
  }

  std::pair<double, double> Range() const {
    const std::string r = Str("range");
    const std::size_t colon = r.find(':');
    if (colon == std::string::npos) throw ConfigError("--range must look like lo:hi");
    try {
      std::size_t a = 0;
      std::size_t b = 0;
      const std::string lo_s = r.substr(0, colon);
      const std::string hi_s = r.substr(colon + 1);
      const double lo = std::stod(lo_s, &a);
      const double hi = std::stod(hi_s, &b);
      if (a == lo_s.size() && b == hi_s.size() && lo > 0.0 && lo <= hi) return {lo, hi};
    } catch (const std::exception&) {
    }
    throw ConfigError("--range must look like lo:hi with 0 < lo <= hi, got '" + r + "'");
  }

  ParserConfig Parser() const {
    return {Num("threshold"), static_cast<int>(Int("min_seg_len"))};
  }

  SamplerConfig Sampler() const {
    SamplerConfig s;
    s.n_docks = static_cast<int>(Int("docks"));
    std::tie(s.range_lo, s.range_hi) = Range();
    s.yaw_jitter = Num("yaw_jitter");
    s.seed = static_cast<std::uint64_t>(Int("seed"));
    s.max_attempts = static_cast<int>(Int("max_attempts"));
    s.planner.max_step = Num("max_step");
    s.planner.clearance = Num("clearance");
    s.Validate();
    return s;
  }

  AugmentConfig Augment() const {
    AugmentConfig a;
    a.sampler = Sampler();
    a.parser = Parser();
    a.augment.retime = RetimePolicy::FromString(Str("retime"));
    a.jobs = static_cast<int>(Int("jobs"));
    return a;
  }
};

std::string ReadText(const fs::path& path, ErrorKind missing_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(missing_kind, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json ParseJson(const std::string& text, const std::string& origin, ErrorKind kind) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(kind, origin + ": " + e.what());
  }
}

void WriteTextAtomically(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(ErrorKind::kIo, "failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::vector<const DemoEntry*> SelectSources(const Manifest& m, const std::string& only) {
  std::vector<const DemoEntry*> out;
  for (const DemoEntry& e : m.demos) {
    if (!only.empty()) {
      if (e.id == only) out.push_back(&e);
    } else if (e.provenance.kind == Provenance::Kind::kSource) {
      out.push_back(&e);
    }
  }
  if (!only.empty() && out.empty()) {
    throw Error(ErrorKind::kFormat, "no demo '" + only + "' in the manifest");
  }
  return out;
}

std::string Fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string DockText(const PlanarPose& d) {
  return "(" + Fixed(d.x(), 3) + ", " + Fixed(d.y(), 3) + ", " + Fixed(d.yaw(), 3) + ")";
}

// ---- subcommands ----------------------------------------------------------

int CmdGenerate(const RunConfig& cfg, std::ostream& out) {
  GenerateConfig g;
  g.pick_demos = static_cast<int>(cfg.Int("pick"));
  g.place_demos = static_cast<int>(cfg.Int("place"));
  g.seed = static_cast<std::uint64_t>(cfg.Int("seed"));
  g.harness.point_count = static_cast<int>(cfg.Int("points"));
  const fs::path dir = cfg.RequirePath("out", "--out");
  const Manifest m = GenerateDataset(g, dir);
  if (cfg.JsonReport()) {
    Json j;
    j["out"] = dir.string();
    Json demos = Json::array();
    for (const DemoEntry& e : m.demos) demos.push_back(e.id);
    j["demos"] = std::move(demos);
    out << j.dump(1) << "\n";
  } else {
    out << "wrote " << m.demos.size() << " source demos to " << dir.string() << "\n";
    for (const DemoEntry& e : m.demos) {
      out << "  " << e.id << "  " << e.n_frames << " frames  scene " << e.scene_id << "\n";
    }
  }
  return kExitOk;
}

int CmdParse(const RunConfig& cfg, std::ostream& out) {
  const Dataset ds = LoadDataset(cfg.RequirePath("dataset", "--dataset"));
  const ParserConfig pc = cfg.Parser();
  Json report = Json::array();
  for (const DemoEntry* e : SelectSources(ds.manifest, cfg.Str("demo"))) {
    const Demonstration demo = ReadDatasetDemo(ds.dir, *e);
    const ParsedTrajectory parsed = Parse(demo, ds.SceneFor(*e), pc);
    Json j;
    j["demo"] = e->id;
    j["threshold"] = pc.threshold;
    j["min_seg_len"] = pc.min_seg_len;
    j["segments"] = json_util::ToJson(parsed.segments);
    report.push_back(std::move(j));
  }
  if (cfg.JsonReport()) {
    out << report.dump(1) << "\n";
    return kExitOk;
  }
  for (const Json& j : report) {
    out << j["demo"].get<std::string>() << "\n";
    for (const Json& s : j["segments"]) {
      out << "  " << std::left << std::setw(7) << s["kind"].get<std::string>()
          << "[" << s["begin"].get<long long>() << ", " << s["end"].get<long long>()
          << ")";
      if (!s["object"].get<std::string>().empty()) out << "  " << s["object"].get<std::string>();
      out << "\n";
    }
  }
  return kExitOk;
}

int CmdSample(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Dataset ds = LoadDataset(cfg.RequirePath("dataset", "--dataset"));
  const AugmentConfig ac = cfg.Augment();
  std::vector<const DemoEntry*> all;
  for (const DemoEntry& e : ds.manifest.demos) {
    if (e.provenance.kind == Provenance::Kind::kSource) all.push_back(&e);
  }
  const std::vector<const DemoEntry*> chosen = SelectSources(ds.manifest, cfg.Str("demo"));
  Json report = Json::array();
  bool exhausted = false;
  for (const DemoEntry* e : chosen) {
    // Same per-source seed as `augment`, so both report identical docks.
    const auto pos = std::find(all.begin(), all.end(), e);
    const std::size_t index = static_cast<std::size_t>(pos - all.begin());
    SamplerConfig sc = ac.sampler;
    sc.seed = MixSeed(ac.sampler.seed, index);
    const Demonstration demo = ReadDatasetDemo(ds.dir, *e);
    const Scene& scene = ds.SceneFor(*e);
    const ParsedTrajectory parsed = Parse(demo, scene, ac.parser);
    Json j;
    j["demo"] = e->id;
    j["sampler_seed"] = sc.seed;
    try {
      const Json r = json_util::ToJson(SampleDocks(scene, demo, parsed, sc));
      for (auto it = r.begin(); it != r.end(); ++it) j[it.key()] = it.value();
      j["error"] = "";
    } catch (const ExhaustionError& x) {
      exhausted = true;
      SampleResult partial;
      partial.attempts = x.attempts();
      partial.histogram = x.histogram();
      const Json r = json_util::ToJson(partial);
      for (auto it = r.begin(); it != r.end(); ++it) j[it.key()] = it.value();
      j["error"] = x.what();
      err << "dockaug: " << e->id << ": " << x.what() << "\n";
    }
    report.push_back(std::move(j));
  }
  if (cfg.JsonReport()) {
    out << report.dump(1) << "\n";
  } else {
    for (const Json& j : report) {
      out << j["demo"].get<std::string>() << "  attempts " << j["attempts"].get<int>()
          << "  rejected: visibility " << j["histogram"]["visibility"].get<int>()
          << ", reachability " << j["histogram"]["reachability"].get<int>()
          << ", collision " << j["histogram"]["collision"].get<int>() << "\n";
      for (const Json& r : j["accepted"]) {
        const PlanarPose d = json_util::PlanarFrom(r["dock"], "dock");
        out << "  accepted attempt " << r["attempt"].get<int>() << "  dock "
            << DockText(d) << "  visible " << Fixed(r["visibility"]["fraction"].get<double>(), 3)
            << "  reach margin " << Fixed(r["reachability"]["margin"].get<double>(), 3) << "\n";
      }
    }
  }
  return exhausted ? kExitExhaustion : kExitOk;
}

int CmdAugment(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const fs::path in = cfg.RequirePath("dataset", "--dataset");
  const fs::path dst = cfg.RequirePath("out", "--out");
  const AugmentConfig ac = cfg.Augment();
  const auto t0 = std::chrono::steady_clock::now();
  const BatchSummary s = AugmentBatch(in, dst, ac);
  const double total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json report;
  report["out"] = dst.string();
  report["total_seconds"] = total;
  Json sources = Json::array();
  int augmented = 0;
  for (const SourceResult& r : s.sources) {
    Json j;
    j["source"] = r.source.id;
    j["augmented"] = r.augmented.size();
    j["attempts"] = r.sample.attempts;
    Json h = Json::object();
    for (const char* key : {"visibility", "reachability", "collision"}) {
      const auto it = r.sample.histogram.find(key);
      h[key] = it == r.sample.histogram.end() ? 0 : it->second;
    }
    j["histogram"] = std::move(h);
    j["augment_seconds"] = r.augment_seconds;
    j["error"] = r.error;
    augmented += static_cast<int>(r.augmented.size());
    sources.push_back(std::move(j));
  }
  report["augmented"] = augmented;
  report["sources"] = std::move(sources);
  report["errors"] = s.manifest.errors;

  if (cfg.JsonReport()) {
    out << report.dump(1) << "\n";
  } else {
    out << "wrote " << augmented << " augmented demos to " << dst.string() << " in "
        << Fixed(total, 3) << " s\n";
    for (const Json& j : report["sources"]) {
      out << "  " << j["source"].get<std::string>() << "  docks "
          << j["augmented"].get<int>() << "  attempts " << j["attempts"].get<int>()
          << "  rejected: visibility " << j["histogram"]["visibility"].get<int>()
          << ", reachability " << j["histogram"]["reachability"].get<int>()
          << ", collision " << j["histogram"]["collision"].get<int>()
          << "  augment " << Fixed(j["augment_seconds"].get<double>(), 4) << " s\n";
    }
  }
  for (const std::string& e : s.manifest.errors) err << "dockaug: " << e << "\n";
  if (s.any_exhausted) return kExitExhaustion;
  return s.failed_sources > 0 ? kExitData : kExitOk;
}

struct VerifyRow {
  std::string demo;
  bool pass = false;
  std::string detail;
};

bool SameAction(const Action& a, const Action& b) {
  return a.target_pose.position() == b.target_pose.position() &&
         a.target_pose.orientation().coeffs() == b.target_pose.orientation().coeffs() &&
         a.gripper_cmd == b.gripper_cmd;
}

double MaxStep(const Demonstration& d) {
  double m = 0.0;
  for (std::size_t t = 1; t < d.frames.size(); ++t) {
    m = std::max(m, (d.frames[t].action.target_pose.position() -
                     d.frames[t - 1].action.target_pose.position())
                        .norm());
  }
  return m;
}

std::vector<Segment> Skills(const std::vector<Segment>& segs) {
  std::vector<Segment> out;
  for (const Segment& s : segs) {
    if (s.kind == SegmentKind::kSkill) out.push_back(s);
  }
  return out;
}

// Empty when the augmented demo keeps its source's skill actions and stays
// within the splice step bound.
std::string CheckAgainstSource(const Demonstration& demo, const DemoEntry& entry,
                               const Demonstration& source, const DemoEntry& src_entry,
                               double max_step) {
  const std::vector<Segment> a = Skills(entry.segments);
  const std::vector<Segment> b = Skills(src_entry.segments);
  if (a.size() != b.size()) return "skill segment count differs from source";
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].length() != b[k].length()) return "skill segment length differs from source";
    for (std::int64_t i = 0; i < a[k].length(); ++i) {
      const auto ta = static_cast<std::size_t>(a[k].begin + i);
      const auto tb = static_cast<std::size_t>(b[k].begin + i);
      if (ta >= demo.frames.size() || tb >= source.frames.size() ||
          !SameAction(demo.frames[ta].action, source.frames[tb].action)) {
        return "skill action at frame " + std::to_string(ta) + " differs from source";
      }
    }
  }
  const double bound = std::max(max_step, MaxStep(source));
  const double jump = MaxStep(demo);
  if (jump > bound) {
    return "action jump " + Fixed(jump, 5) + " exceeds bound " + Fixed(bound, 5);
  }
  return {};
}

int CmdVerify(const RunConfig& cfg, std::ostream& out) {
  const Dataset ds = LoadDataset(cfg.RequirePath("dataset", "--dataset"));
  const double max_step = cfg.Num("max_step");
  const Manifest& m = ds.manifest;

  std::map<std::string, Demonstration> sources;
  for (const DemoEntry& e : m.demos) {
    if (e.provenance.kind != Provenance::Kind::kSource) continue;
    try {
      sources.emplace(e.id, ReadDatasetDemo(ds.dir, e));
    } catch (const Error&) {
      // Reported on its own row below.
    }
  }

  ValidationOptions vo;
  vo.point_count = m.point_count;
  vo.binary_gripper = m.binary_gripper;
  const std::vector<VerifyRow> rows = OrderedMap<VerifyRow>(
      m.demos.size(), static_cast<int>(cfg.Int("jobs")), [&](std::size_t i) {
        const DemoEntry& e = m.demos[i];
        VerifyRow row{e.id, false, ""};
        try {
          const Demonstration demo = ReadDatasetDemo(ds.dir, e);
          const std::vector<Violation> v = ValidateDemo(demo, vo);
          if (!v.empty()) {
            row.detail = FormatViolations(v);
            return row;
          }
          if (!e.segments.empty()) CheckSegmentTable(e.segments, demo.length());
          if (e.provenance.kind == Provenance::Kind::kAugmented) {
            const DemoEntry* se = m.Find(e.provenance.source_id);
            const auto it = sources.find(e.provenance.source_id);
            if (se == nullptr || it == sources.end()) {
              row.detail = "source '" + e.provenance.source_id + "' is missing or unreadable";
              return row;
            }
            row.detail = CheckAgainstSource(demo, e, it->second, *se, max_step);
            if (!row.detail.empty()) return row;
          }
          const ReplayReport rep = Replay(ds.SceneFor(e), demo);
          row.pass = rep.pass();
          row.detail = FormatReplayReport(rep);
        } catch (const Error& x) {
          row.detail = std::string(ErrorKindName(x.kind())) + ": " + x.what();
        }
        return row;
      });

  int failed = 0;
  for (const VerifyRow& r : rows) failed += r.pass ? 0 : 1;
  if (cfg.JsonReport()) {
    Json j;
    Json arr = Json::array();
    for (const VerifyRow& r : rows) {
      Json jr;
      jr["demo"] = r.demo;
      jr["pass"] = r.pass;
      jr["detail"] = r.detail;
      arr.push_back(std::move(jr));
    }
    j["demos"] = std::move(arr);
    j["failed"] = failed;
    out << j.dump(1) << "\n";
  } else {
    std::size_t w = 4;
    for (const VerifyRow& r : rows) w = std::max(w, r.demo.size());
    for (const VerifyRow& r : rows) {
      out << std::left << std::setw(static_cast<int>(w)) << r.demo << "  "
          << (r.pass ? "PASS" : "FAIL") << "  " << r.detail << "\n";
    }
    out << rows.size() - static_cast<std::size_t>(failed) << "/" << rows.size()
        << " demos pass\n";
  }
  return failed > 0 ? kExitVerification : kExitOk;
}

int CmdStats(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = cfg.RequirePath("dataset", "--dataset");
  const Manifest m = ReadManifest(dir);
  int sources = 0;
  int augmented = 0;
  std::int64_t frames = 0;
  for (const DemoEntry& e : m.demos) {
    (e.provenance.kind == Provenance::Kind::kSource ? sources : augmented) += 1;
    frames += e.n_frames;
  }
  std::map<std::string, int> hist = {{"visibility", 0}, {"reachability", 0}, {"collision", 0}};
  int attempts = 0;
  const Json feas = ParseJson(m.feasibility_json, "feasibility", ErrorKind::kFormat);
  if (feas.is_array()) {
    for (const Json& s : feas) {
      attempts += s.value("attempts", 0);
      if (!s.contains("histogram")) continue;
      for (auto& [k, v] : hist) v += s["histogram"].value(k, 0);
    }
  }
  Json j;
  j["point_count"] = m.point_count;
  j["scenes"] = m.scenes.size();
  j["demos"] = m.demos.size();
  j["sources"] = sources;
  j["augmented"] = augmented;
  j["frames"] = frames;
  j["attempts"] = attempts;
  Json h = Json::object();
  for (const auto& [k, v] : hist) h[k] = v;
  j["rejections"] = std::move(h);
  j["errors"] = m.errors;
  if (cfg.JsonReport()) {
    out << j.dump(1) << "\n";
  } else {
    out << "demos " << m.demos.size() << " (" << sources << " source, " << augmented
        << " augmented), " << frames << " frames, " << m.point_count << " points/frame\n"
        << "scenes " << m.scenes.size() << "\n"
        << "dock attempts " << attempts << ", rejected: visibility " << hist["visibility"]
        << ", reachability " << hist["reachability"] << ", collision "
        << hist["collision"] << "\n";
    for (const std::string& e : m.errors) out << "error: " << e << "\n";
  }
  return kExitOk;
}

// Test docks file: a JSON array of {"scene", "x", "y", "yaw"}.
std::vector<std::pair<std::string, PlanarPose>> ReadDocksFile(const fs::path& path) {
  const Json j = ParseJson(ReadText(path, ErrorKind::kIo), path.string(), ErrorKind::kFormat);
  if (!j.is_array()) throw Error(ErrorKind::kFormat, path.string() + ": expected an array");
  std::vector<std::pair<std::string, PlanarPose>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = "[" + std::to_string(i) + "]";
    const Json& s = json_util::At(j[i], "scene", where + ".");
    if (!s.is_string()) throw Error(ErrorKind::kFormat, path.string() + ": " + where + ".scene");
    out.emplace_back(s.get<std::string>(), json_util::PlanarFrom(j[i], where));
  }
  return out;
}

int CmdEvalNn(const RunConfig& cfg, std::ostream& out) {
  const Dataset ds = LoadDataset(cfg.RequirePath("train", "--train"));
  const auto docks = ReadDocksFile(cfg.RequirePath("test_docks", "--docks"));

  std::map<std::string, std::vector<Demonstration>> by_scene;
  for (const DemoEntry& e : ds.manifest.demos) {
    by_scene[e.scene_id].push_back(ReadDatasetDemo(ds.dir, e));
  }
  std::map<std::string, NnPolicy> policies;
  std::map<std::string, int> horizon;
  for (const auto& [scene_id, demos] : by_scene) {
    std::vector<const Demonstration*> ptrs;
    std::size_t longest = 0;
    for (const Demonstration& d : demos) {
      ptrs.push_back(&d);
      longest = std::max(longest, d.frames.size());
    }
    policies.emplace(scene_id, NnPolicy(ptrs, FeatureObjectLabels(ds.scenes.at(scene_id))));
    horizon[scene_id] = static_cast<int>(longest + longest / 2);
  }
  for (const auto& [scene_id, dock] : docks) {
    if (!policies.count(scene_id)) {
      throw Error(ErrorKind::kFormat, "no training demos for scene '" + scene_id + "'");
    }
  }

  const std::vector<RolloutLog> logs = OrderedMap<RolloutLog>(
      docks.size(), static_cast<int>(cfg.Int("jobs")), [&](std::size_t i) {
        const auto& [scene_id, dock] = docks[i];
        RolloutConfig rc;
        rc.point_count = ds.manifest.point_count;
        rc.fps_seed = ds.manifest.fps_seed;
        rc.horizon = horizon.at(scene_id);
        return Rollout(policies.at(scene_id), ds.scenes.at(scene_id), dock, rc);
      });

  if (!cfg.Str("out").empty()) {
    std::string lines;
    for (const RolloutLog& l : logs) lines += RolloutLogToJson(l) + "\n";
    WriteTextAtomically(cfg.Str("out"), lines);
  }
  int wins = 0;
  Json rows = Json::array();
  for (std::size_t i = 0; i < logs.size(); ++i) {
    wins += logs[i].success ? 1 : 0;
    Json r;
    r["scene"] = docks[i].first;
    r["dock"] = json_util::ToJson(docks[i].second);
    r["success"] = logs[i].success;
    r["steps"] = logs[i].steps.size();
    r["failure"] = logs[i].failure;
    rows.push_back(std::move(r));
  }
  if (cfg.JsonReport()) {
    Json j;
    j["feature_version"] = kNnFeatureVersion;
    j["rollouts"] = std::move(rows);
    j["successes"] = wins;
    j["trials"] = logs.size();
    out << j.dump(1) << "\n";
  } else {
    for (std::size_t i = 0; i < logs.size(); ++i) {
      out << docks[i].first << "  " << DockText(docks[i].second) << "  "
          << (logs[i].success ? "success" : "fail: " + logs[i].failure) << "\n";
    }
    out << "success " << wins << "/" << logs.size() << "\n";
  }
  return kExitOk;
}

// Each subcommand exposes a subset of the settings as flags.
const std::map<std::string, std::vector<std::string>>& CommandFlags() {
  static const std::map<std::string, std::vector<std::string>> flags = {
      {"generate", {"out", "points", "seed", "pick", "place"}},
      {"parse", {"dataset", "demo", "threshold", "min_seg_len"}},
      {"sample",
       {"dataset", "demo", "docks", "range", "seed", "threshold", "min_seg_len",
        "max_attempts", "yaw_jitter", "max_step", "clearance"}},
      {"augment",
       {"dataset", "out", "docks", "range", "threshold", "min_seg_len", "seed",
        "jobs", "retime", "max_attempts", "yaw_jitter", "max_step", "clearance"}},
      {"verify", {"dataset", "jobs", "max_step"}},
      {"stats", {"dataset"}},
      {"eval-nn", {"train", "test_docks", "out", "jobs"}},
  };
  return flags;
}

std::string FlagName(const std::string& key) {
  if (key == "test_docks") return "--docks";
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

}  // namespace

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return kExitConfig;
    case ErrorKind::kExhaustion:
    case ErrorKind::kPlanning:
      return kExitExhaustion;
    default:
      return kExitData;
  }
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dockaug: lift one mobile-manipulation demo to many docking poses"};
  app.require_subcommand(1);
  std::string config_file;
  bool print_config = false;
  std::string report;
  app.add_option("--config", config_file, "JSON settings file; flags override it");
  app.add_flag("--print-config", print_config, "print the effective settings and exit");
  app.add_option("--report", report, "report format: text or json");

  const Json defaults = DefaultConfig();
  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> help = {
      {"generate", "write a source dataset of scripted harness demos"},
      {"parse", "print the motion/skill segment table of source demos"},
      {"sample", "sample feasible docks and print the feasibility reports"},
      {"augment", "augment every source demo to new docks"},
      {"verify", "check invariants and replay every demo"},
      {"stats", "summarize a dataset manifest"},
      {"eval-nn", "roll out a nearest-neighbor policy at test docks"},
  };
  const std::map<std::string, std::string> flag_help = {
      {"dataset", "dataset directory"},
      {"out", "output path"},
      {"train", "training dataset directory"},
      {"demo", "only this demo id"},
      {"docks", "docks per source"},
      {"test_docks", "JSON file of test docks"},
      {"range", "distance ratio range lo:hi"},
      {"threshold", "parser contact threshold, meters"},
      {"min_seg_len", "shortest segment, frames"},
      {"points", "points per frame, 1024 or 2048"},
      {"seed", "base seed"},
      {"jobs", "worker threads"},
      {"retime", "match, source or fixed:<n>"},
      {"yaw_jitter", "angular jitter, radians"},
      {"max_attempts", "candidate docks tried per source"},
      {"max_step", "largest step between motion waypoints, meters"},
      {"clearance", "end-effector clearance, meters"},
      {"pick", "pick demos to generate"},
      {"place", "place demos to generate"},
  };
  for (const auto& [name, keys] : CommandFlags()) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->fallthrough();
    for (const std::string& key : keys) {
      std::string text = flag_help.count(key) ? flag_help.at(key) : "";
      const Json& d = defaults.at(key);
      if (!(d.is_string() && d.get<std::string>().empty())) {
        text += " (default " + (d.is_string() ? d.get<std::string>() : d.dump()) + ")";
      }
      sub->add_option(FlagName(key), flag_values[name][key], text);
    }
    subs[name] = sub;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return kExitOk;
    err << "dockaug: " << e.what() << "\n";
    return kExitConfig;
  }

  std::string command;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) command = name;
  }

  try {
    RunConfig cfg{defaults};
    if (!config_file.empty()) {
      const Json file =
          ParseJson(ReadText(config_file, ErrorKind::kConfig), config_file, ErrorKind::kConfig);
      if (!file.is_object()) throw ConfigError(config_file + ": expected a JSON object");
      for (auto it = file.begin(); it != file.end(); ++it) {
        cfg.values[it.key()] = Coerce(defaults, it.key(), it.value());
      }
    }
    CLI::App* sub = subs.at(command);
    for (const std::string& key : CommandFlags().at(command)) {
      if (sub->count(FlagName(key)) > 0) {
        cfg.values[key] = Coerce(defaults, key, Json(flag_values[command][key]));
      }
    }
    if (app.count("--report") > 0) cfg.values["report"] = report;
    cfg.Validate();

    if (print_config) {
      out << cfg.values.dump(1) << "\n";
      return kExitOk;
    }
    if (command == "generate") return CmdGenerate(cfg, out);
    if (command == "parse") return CmdParse(cfg, out);
    if (command == "sample") return CmdSample(cfg, out, err);
    if (command == "augment") return CmdAugment(cfg, out, err);
    if (command == "verify") return CmdVerify(cfg, out);
    if (command == "stats") return CmdStats(cfg, out);
    return CmdEvalNn(cfg, out);
  } catch (const Error& e) {
    err << "dockaug: " << ErrorKindName(e.kind()) << " error: " << e.what() << "\n";
    return ExitCodeFor(e.kind());
  } catch (const std::exception& e) {
    err << "dockaug: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace dockaug
