#include "dockaug/pipeline.h"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "dockaug/error.h"
#include "test_util.h"

namespace dockaug {
namespace {

namespace fs = std::filesystem;

// Relative path -> bytes for every regular file under `dir`.
std::map<std::string, std::string> Snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), dir).string()] = ss.str();
  }
  return out;
}

AugmentConfig SmallBatch(int jobs) {
  AugmentConfig c;
  c.sampler.n_docks = 2;
  c.sampler.seed = 5;
  c.jobs = jobs;
  return c;
}

TEST(OrderedMap, KeepsIndexOrderForAnyJobCount) {
  const std::function<int(std::size_t)> sq = [](std::size_t i) {
    return static_cast<int>(i * i);
  };
  const std::vector<int> one = OrderedMap<int>(20, 1, sq);
  const std::vector<int> four = OrderedMap<int>(20, 4, sq);
  EXPECT_EQ(one, four);
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i], static_cast<int>(i * i));
  EXPECT_TRUE(OrderedMap<int>(0, 3, sq).empty());
}

TEST(OrderedMap, RethrowsFirstFailureByIndex) {
  const std::function<int(std::size_t)> fn = [](std::size_t i) -> int {
    if (i == 2 || i == 5) throw std::runtime_error("item " + std::to_string(i));
    return 0;
  };
  for (int jobs : {1, 3}) {
    try {
      OrderedMap<int>(8, jobs, fn);
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "item 2");
    }
  }
}

TEST(WriteDatasetAtomically, FailureLeavesPreviousOutput) {
  testing::TempDir dir("atomic");
  const fs::path out = dir.path() / "ds";
  WriteDatasetAtomically(out, [](const fs::path& d) { std::ofstream(d / "a.txt") << "one"; });
  EXPECT_EQ(Snapshot(out).at("a.txt"), "one");
  EXPECT_THROW(WriteDatasetAtomically(out,
                                      [](const fs::path& d) {
                                        std::ofstream(d / "a.txt") << "two";
                                        throw Error(ErrorKind::kIo, "disk full");
                                      }),
               Error);
  EXPECT_EQ(Snapshot(out).at("a.txt"), "one");
  EXPECT_FALSE(fs::exists(dir.path() / "ds.tmp"));
  WriteDatasetAtomically(out, [](const fs::path& d) { std::ofstream(d / "b.txt") << "x"; });
  const auto snap = Snapshot(out);
  EXPECT_EQ(snap.count("a.txt"), 0u);
  EXPECT_EQ(snap.count("b.txt"), 1u);
}

TEST(Generate, WritesLoadableDataset) {
  testing::TempDir dir("gen");
  GenerateConfig g;
  g.pick_demos = 2;
  g.place_demos = 1;
  const Manifest m = GenerateDataset(g, dir.path() / "src");
  const Dataset ds = LoadDataset(dir.path() / "src");
  ASSERT_EQ(ds.manifest.demos.size(), 3u);
  EXPECT_EQ(ds.manifest.scenes, (std::vector<std::string>{"pick_0", "pick_1", "place_0"}));
  for (const DemoEntry& e : ds.manifest.demos) {
    EXPECT_EQ(e.id, e.scene_id + "_src");
    const Demonstration d = ReadDatasetDemo(ds.dir, e);
    EXPECT_TRUE(ValidateDemo(d).empty());
    EXPECT_TRUE(Replay(ds.SceneFor(e), d).pass()) << e.id;
    EXPECT_EQ(e.segments, Parse(d, ds.SceneFor(e)).segments);
  }
  g.pick_demos = 0;
  g.place_demos = 0;
  EXPECT_THROW(GenerateDataset(g, dir.path() / "none"), Error);
}

TEST(AugmentBatch, DeterministicAndIndependentOfJobs) {
  testing::TempDir dir("batch");
  GenerateConfig g;
  g.pick_demos = 2;
  g.place_demos = 1;
  GenerateDataset(g, dir.path() / "src");
  const BatchSummary a = AugmentBatch(dir.path() / "src", dir.path() / "a", SmallBatch(1));
  AugmentBatch(dir.path() / "src", dir.path() / "b", SmallBatch(1));
  AugmentBatch(dir.path() / "src", dir.path() / "c", SmallBatch(3));
  EXPECT_EQ(a.failed_sources, 0);
  EXPECT_EQ(a.manifest.demos.size(), 3u * 3);
  const auto sa = Snapshot(dir.path() / "a");
  EXPECT_EQ(sa, Snapshot(dir.path() / "b"));
  EXPECT_EQ(sa, Snapshot(dir.path() / "c"));
  EXPECT_FALSE(fs::exists(dir.path() / "a.tmp"));

  // Every augmented demo replays at its dock.
  const Dataset out = LoadDataset(dir.path() / "a");
  for (const DemoEntry& e : out.manifest.demos) {
    const Demonstration d = ReadDatasetDemo(out.dir, e);
    EXPECT_TRUE(Replay(out.SceneFor(e), d).pass()) << e.id;
    CheckSegmentTable(e.segments, e.n_frames);
  }
}

TEST(AugmentBatch, FailedSourceIsRecordedAndBatchContinues) {
  testing::TempDir dir("fail");
  GenerateConfig g;
  g.pick_demos = 2;
  g.place_demos = 0;
  GenerateDataset(g, dir.path() / "src");
  // Move pick_1's cube far from where its demo grasps: no dock can reach it.
  Scene s = ReadSceneFile(SceneFilePath(dir.path() / "src", "pick_1"));
  for (SceneObject& o : s.objects) {
    if (o.id != "cube") continue;
    o.shape.pose = Compose(Pose::Translation(3, 0, 0), o.shape.pose);
    for (Vec3& p : o.points) p += Vec3(3, 0, 0);
  }
  WriteSceneFile(s, SceneFilePath(dir.path() / "src", "pick_1"));

  const BatchSummary r = AugmentBatch(dir.path() / "src", dir.path() / "out", SmallBatch(1));
  EXPECT_EQ(r.failed_sources, 1);
  EXPECT_TRUE(r.any_exhausted);
  ASSERT_EQ(r.manifest.errors.size(), 1u);
  EXPECT_EQ(r.manifest.errors[0].rfind("pick_1_src: ", 0), 0u);
  // The healthy source still got its docks; the failed one is kept as is.
  EXPECT_EQ(r.manifest.demos.size(), 1u + 2u + 1u);
  EXPECT_EQ(ReadManifest(dir.path() / "out").errors, r.manifest.errors);
}

TEST(AugmentBatch, UnreadableSourceIsRecorded) {
  testing::TempDir dir("corrupt");
  GenerateConfig g;
  g.pick_demos = 2;
  g.place_demos = 0;
  const Manifest m = GenerateDataset(g, dir.path() / "src");
  const fs::path bin = dir.path() / "src" / m.demos[0].file;
  fs::resize_file(bin, fs::file_size(bin) / 2);
  const BatchSummary r = AugmentBatch(dir.path() / "src", dir.path() / "out", SmallBatch(1));
  EXPECT_EQ(r.failed_sources, 1);
  EXPECT_FALSE(r.any_exhausted);
  ASSERT_EQ(r.manifest.errors.size(), 1u);
  EXPECT_EQ(r.manifest.errors[0].rfind("pick_0_src: format: ", 0), 0u) << r.manifest.errors[0];
  EXPECT_EQ(r.manifest.demos.size(), 1u + 2u);
  const Dataset out = LoadDataset(dir.path() / "out");
  for (const DemoEntry& e : out.manifest.demos) EXPECT_NO_THROW(ReadDatasetDemo(out.dir, e));
}

TEST(AugmentBatch, ExhaustionIsFlagged) {
  testing::TempDir dir("exh");
  GenerateConfig g;
  g.place_demos = 0;
  GenerateDataset(g, dir.path() / "src");
  AugmentConfig c = SmallBatch(1);
  c.sampler.range_lo = 6;
  c.sampler.range_hi = 7;
  c.sampler.max_attempts = 5;
  const BatchSummary r = AugmentBatch(dir.path() / "src", dir.path() / "out", c);
  EXPECT_TRUE(r.any_exhausted);
  ASSERT_EQ(r.manifest.errors.size(), 1u);
  EXPECT_NE(r.manifest.errors[0].find("exhausted"), std::string::npos);
  EXPECT_NE(r.manifest.feasibility_json.find("\"attempts\":5"), std::string::npos);
}

TEST(AugmentBatch, MissingInputNamesManifestPath) {
  testing::TempDir dir("missing");
  try {
    AugmentBatch(dir.path() / "nope", dir.path() / "out", SmallBatch(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
    EXPECT_NE(std::string(e.what()).find((dir.path() / "nope" / "manifest.json").string()),
              std::string::npos);
  }
  EXPECT_FALSE(fs::exists(dir.path() / "out"));
}

}  // namespace
}  // namespace dockaug
