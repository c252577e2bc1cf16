#ifndef DOCKAUG_PIPELINE_H_
#define DOCKAUG_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dockaug/augmentor.h"
#include "dockaug/demo_io.h"
#include "dockaug/dock_sampler.h"
#include "dockaug/scene.h"
#include "dockaug/sim_harness.h"
#include "dockaug/trajectory_parser.h"

namespace dockaug {

// A dataset directory loaded into memory, scenes keyed by id.
struct Dataset {
  std::filesystem::path dir;
  Manifest manifest;
  std::map<std::string, Scene> scenes;

  const Scene& SceneFor(const DemoEntry& entry) const;
};

// Reads the manifest and every scene file. Demos are read on demand.
Dataset LoadDataset(const std::filesystem::path& dir);

// Writes into `<out>.tmp` through `fill`, then replaces `out` with it. The
// temporary directory is removed if `fill` throws.
void WriteDatasetAtomically(const std::filesystem::path& out,
                            const std::function<void(const std::filesystem::path&)>& fill);

struct GenerateConfig {
  int pick_demos = 1;
  int place_demos = 1;
  std::uint64_t seed = 0;
  HarnessOptions harness;
};

// Source dataset of scripted harness demos: one scene per demo.
Manifest GenerateDataset(const GenerateConfig& config,
                         const std::filesystem::path& out);

struct AugmentConfig {
  SamplerConfig sampler;  // sampler.seed is mixed with the source index
  ParserConfig parser;
  AugmentOptions augment;
  int jobs = 1;
};

// Outcome of one source demo.
struct SourceResult {
  Demonstration source;
  std::uint64_t sampler_seed = 0;
  ParsedTrajectory parsed;
  SampleResult sample;
  std::vector<Demonstration> augmented;
  std::vector<std::vector<Segment>> augmented_segments;
  double augment_seconds = 0.0;  // wall clock of the augment step only
  std::string error;  // non-empty when the source failed
  ErrorKind error_kind = ErrorKind::kExhaustion;
};

// parse -> sample -> augment for one source.
// Errors of the library are caught and recorded in the result.
SourceResult AugmentSource(Demonstration source, const Scene& scene,
                           std::size_t source_index, const AugmentConfig& config);

// Runs `fn(i)` for i in [0, n) on up to `jobs` threads and returns the
// results in index order. The first exception in index order is rethrown
// after all workers finish.
template <typename T>
std::vector<T> OrderedMap(std::size_t n, int jobs,
                          const std::function<T(std::size_t)>& fn);

struct BatchSummary {
  Manifest manifest;
  std::vector<SourceResult> sources;
  int failed_sources = 0;
  bool any_exhausted = false;
};

// Augments every source demo of the dataset at `in` and writes the sources,
// their augmentations and the feasibility statistics to `out`. A source
// that fails is listed in the manifest's errors and the batch continues.
BatchSummary AugmentBatch(const std::filesystem::path& in,
                          const std::filesystem::path& out,
                          const AugmentConfig& config);

// Feasibility statistics of a batch, as stored in the manifest.
std::string FeasibilityJson(const std::vector<SourceResult>& results);

}  // namespace dockaug

#include "dockaug/pipeline_inl.h"

#endif  // DOCKAUG_PIPELINE_H_
