#include "dockaug/pipeline.h"

#include <chrono>
#include <system_error>

#include "dockaug/error.h"
#include "dockaug/random.h"
#include "report_json.h"

namespace dockaug {

namespace json_util {

Json ToJson(const FeasibilityReport& r) {
  Json j;
  j["attempt"] = r.attempt;
  j["dock"] = ToJson(r.dock);
  j["accepted"] = r.accepted;
  Json v;
  v["pass"] = r.visibility.pass;
  v["fraction"] = r.visibility.fraction;
  v["visible"] = r.visibility.visible;
  v["total"] = r.visibility.total;
  j["visibility"] = std::move(v);
  Json re;
  re["pass"] = r.reachability.pass;
  re["margin"] = r.reachability.margin;
  re["worst_frame"] = r.reachability.worst_frame;
  j["reachability"] = std::move(re);
  Json c;
  c["pass"] = r.collision_free.pass;
  c["base_clear"] = r.collision_free.base_clear;
  c["failing_index"] = r.collision_free.failing_index;
  c["failing_shape"] = r.collision_free.failing_shape;
  j["collision"] = std::move(c);
  return j;
}

Json ToJson(const SampleResult& result) {
  Json j;
  j["attempts"] = result.attempts;
  Json h = Json::object();
  for (const char* key : {"visibility", "reachability", "collision"}) {
    const auto it = result.histogram.find(key);
    h[key] = it == result.histogram.end() ? 0 : it->second;
  }
  j["histogram"] = std::move(h);
  Json acc = Json::array();
  for (const FeasibilityReport& r : result.accepted) acc.push_back(ToJson(r));
  j["accepted"] = std::move(acc);
  Json rej = Json::array();
  for (const FeasibilityReport& r : result.rejected) rej.push_back(ToJson(r));
  j["rejected"] = std::move(rej);
  return j;
}

Json ToJson(const std::vector<Segment>& segments) {
  Json out = Json::array();
  for (const Segment& s : segments) {
    Json j;
    j["kind"] = SegmentKindName(s.kind);
    j["begin"] = s.begin;
    j["end"] = s.end;
    j["object"] = s.object_id;
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace json_util

namespace fs = std::filesystem;

const Scene& Dataset::SceneFor(const DemoEntry& entry) const {
  const auto it = scenes.find(entry.scene_id);
  if (it == scenes.end()) {
    throw Error(ErrorKind::kFormat, "demo '" + entry.id + "' refers to unknown scene '" +
                                        entry.scene_id + "'");
  }
  return it->second;
}

Dataset LoadDataset(const fs::path& dir) {
  Dataset ds;
  ds.dir = dir;
  ds.manifest = ReadManifest(dir);
  for (const std::string& id : ds.manifest.scenes) {
    const fs::path path = SceneFilePath(dir, id);
    Scene scene;
    try {
      scene = ReadSceneFile(path);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kIo) throw;
      throw Error(e.kind(), path.string() + ": " + e.what());
    }
    if (scene.id != id) {
      throw Error(ErrorKind::kFormat, path.string() + ": scene id '" + scene.id +
                                          "' does not match the manifest");
    }
    ds.scenes.emplace(id, std::move(scene));
  }
  return ds;
}

void WriteDatasetAtomically(const fs::path& out,
                            const std::function<void(const fs::path&)>& fill) {
  fs::path tmp = out;
  tmp += ".tmp";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot clear " + tmp.string() + ": " + ec.message());
  fs::create_directories(tmp / "scenes", ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + tmp.string() + ": " + ec.message());
  fs::create_directories(tmp / "demos", ec);
  try {
    fill(tmp);
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
  fs::remove_all(out, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot replace " + out.string() + ": " + ec.message());
  fs::rename(tmp, out, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot rename " + tmp.string() + ": " + ec.message());
}

namespace {

void MergeLabels(LabelTable& into, const Scene& scene) {
  const LabelTable table = scene.Labels();
  for (const LabelEntry& e : table.entries()) {
    if (!e.label.is_object()) continue;
    into.AddObject(e.name.substr(std::string("object:").size()), e.label);
  }
}

}  // namespace

Manifest GenerateDataset(const GenerateConfig& config, const fs::path& out) {
  if (config.pick_demos < 0 || config.place_demos < 0 ||
      config.pick_demos + config.place_demos == 0) {
    throw Error(ErrorKind::kConfig, "generate needs at least one demo");
  }
  Manifest m;
  m.point_count = config.harness.point_count;
  m.binary_gripper = true;
  m.fps_seed = config.harness.fps_seed;

  std::vector<std::pair<Scene, ScriptedDemo>> items;
  const auto add = [&](bool place, int i) {
    const std::uint64_t seed =
        MixSeed(config.seed, static_cast<std::uint64_t>(place ? 1000 + i : i));
    HarnessCase hc = place ? MakePlaceScene(seed, config.harness)
                           : MakePickScene(seed, config.harness);
    hc.scene.id = std::string(place ? "place_" : "pick_") + std::to_string(i);
    ScriptedDemo demo = MakeScriptedDemo(hc.scene, hc.source_dock, seed,
                                         config.harness, hc.scene.id + "_src");
    items.emplace_back(std::move(hc.scene), std::move(demo));
  };
  for (int i = 0; i < config.pick_demos; ++i) add(false, i);
  for (int i = 0; i < config.place_demos; ++i) add(true, i);

  WriteDatasetAtomically(out, [&](const fs::path& dir) {
    for (const auto& [scene, scripted] : items) {
      MergeLabels(m.labels, scene);
      m.scenes.push_back(scene.id);
      WriteSceneFile(scene, SceneFilePath(dir, scene.id));
      const ParsedTrajectory parsed = Parse(scripted.demo, scene);
      m.demos.push_back(WriteDatasetDemo(dir, scripted.demo, parsed.segments));
    }
    WriteManifest(m, dir);
  });
  return m;
}

SourceResult AugmentSource(Demonstration source, const Scene& scene,
                           std::size_t source_index, const AugmentConfig& config) {
  SourceResult r;
  r.source = std::move(source);
  SamplerConfig sampler = config.sampler;
  sampler.seed = MixSeed(config.sampler.seed, source_index);
  r.sampler_seed = sampler.seed;
  AugmentOptions opts = config.augment;
  opts.planner = sampler.planner;
  try {
    r.parsed = Parse(r.source, scene, config.parser);
    r.sample = SampleDocks(scene, r.source, r.parsed, sampler);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < r.sample.accepted.size(); ++k) {
      const AugmentationJob job{&r.source, &r.parsed, &scene,
                                r.sample.accepted[k].dock, static_cast<int>(k),
                                sampler.planner.seed};
      std::vector<Segment> segments;
      r.augmented.push_back(Augment(job, opts, &segments));
      r.augmented_segments.push_back(std::move(segments));
    }
    r.augment_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } catch (const ExhaustionError& e) {
    r.sample.attempts = e.attempts();
    r.sample.histogram = e.histogram();
    r.error = e.what();
    r.error_kind = e.kind();
  } catch (const Error& e) {
    r.error = e.what();
    r.error_kind = e.kind();
  }
  if (!r.error.empty()) {
    r.augmented.clear();
    r.augmented_segments.clear();
  }
  return r;
}

std::string FeasibilityJson(const std::vector<SourceResult>& results) {
  using json_util::Json;
  Json out = Json::array();
  for (const SourceResult& r : results) {
    Json j;
    j["source"] = r.source.id;
    j["sampler_seed"] = r.sampler_seed;
    Json s = json_util::ToJson(r.sample);
    for (auto it = s.begin(); it != s.end(); ++it) j[it.key()] = it.value();
    j["error"] = r.error;
    out.push_back(std::move(j));
  }
  return out.dump();
}

BatchSummary AugmentBatch(const fs::path& in, const fs::path& out,
                          const AugmentConfig& config) {
  config.sampler.Validate();
  if (config.jobs < 1) throw Error(ErrorKind::kConfig, "--jobs must be at least 1");
  const Dataset ds = LoadDataset(in);

  std::vector<const DemoEntry*> sources;
  for (const DemoEntry& e : ds.manifest.demos) {
    if (e.provenance.kind == Provenance::Kind::kSource) sources.push_back(&e);
  }
  if (sources.empty()) {
    throw Error(ErrorKind::kEmptyInput, in.string() + " holds no source demos");
  }

  AugmentConfig cfg = config;
  cfg.augment.validation.point_count = ds.manifest.point_count;
  cfg.augment.validation.binary_gripper = ds.manifest.binary_gripper;

  BatchSummary summary;
  summary.sources = OrderedMap<SourceResult>(
      sources.size(), config.jobs, [&](std::size_t i) {
        const DemoEntry& e = *sources[i];
        Demonstration demo;
        try {
          demo = ReadDatasetDemo(ds.dir, e);
        } catch (const Error& err) {
          SourceResult r;
          r.source.id = e.id;
          r.error = err.what();
          r.error_kind = err.kind();
          return r;
        }
        return AugmentSource(std::move(demo), ds.SceneFor(e), i, cfg);
      });

  Manifest& m = summary.manifest;
  m.point_count = ds.manifest.point_count;
  m.binary_gripper = ds.manifest.binary_gripper;
  m.fps_seed = ds.manifest.fps_seed;
  m.labels = ds.manifest.labels;
  for (const DemoEntry* e : sources) {
    if (std::find(m.scenes.begin(), m.scenes.end(), e->scene_id) == m.scenes.end()) {
      m.scenes.push_back(e->scene_id);
    }
  }
  for (const SourceResult& r : summary.sources) {
    if (r.error.empty()) continue;
    ++summary.failed_sources;
    summary.any_exhausted |= r.error_kind == ErrorKind::kExhaustion;
    m.errors.push_back(r.source.id + ": " + ErrorKindName(r.error_kind) + ": " + r.error);
  }
  m.feasibility_json = FeasibilityJson(summary.sources);

  WriteDatasetAtomically(out, [&](const fs::path& dir) {
    for (const std::string& id : m.scenes) {
      WriteSceneFile(ds.scenes.at(id), SceneFilePath(dir, id));
    }
    for (const SourceResult& r : summary.sources) {
      // An unreadable source is only listed in the errors.
      if (r.source.frames.empty()) continue;
      m.demos.push_back(WriteDatasetDemo(dir, r.source, r.parsed.segments));
      for (std::size_t k = 0; k < r.augmented.size(); ++k) {
        m.demos.push_back(
            WriteDatasetDemo(dir, r.augmented[k], r.augmented_segments[k]));
      }
    }
    WriteManifest(m, dir);
  });
  return summary;
}

}  // namespace dockaug
