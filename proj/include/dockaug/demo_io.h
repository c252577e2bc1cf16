#ifndef DOCKAUG_DEMO_IO_H_
#define DOCKAUG_DEMO_IO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dockaug/demo_model.h"
#include "dockaug/trajectory_parser.h"

namespace dockaug {

// Binary demo layout, all little-endian:
//   header : "DKAG" u32 version, str id, str scene_id, f64 x y yaw,
//            u8 provenance kind, str source_id, i32 dock_id, u32 n_frames,
//            u8 has_colors
//   frame  : i64 t, u32 n_points, u32 n_labels, u32 n_colors,
//            f64[7] state pose (px py pz qw qx qy qz), f64 gripper,
//            f64[7] action pose, f64 gripper_cmd,
//            f32[3 n_points] points, u8[n_labels] labels,
//            f32[3 n_colors] colors
// where str is a u32 byte length followed by the bytes. Point coordinates
// are stored as float32; everything else round-trips exactly.
inline constexpr char kDemoMagic[4] = {'D', 'K', 'A', 'G'};
inline constexpr std::uint32_t kDemoFormatVersion = 1;

struct SerializedDemo {
  std::string bytes;
  std::vector<std::uint64_t> frame_offsets;
};

SerializedDemo SerializeDemo(const Demonstration& demo);
Demonstration DeserializeDemo(const std::string& bytes,
                              const std::string& origin = "<memory>");

// Writes the canonical serialization; returns the frame offsets.
std::vector<std::uint64_t> WriteDemo(const Demonstration& demo,
                                     const std::filesystem::path& path);
// Rejects malformed files (format errors name the first offending field) and
// invariant violations (naming the frame index).
Demonstration ReadDemo(const std::filesystem::path& path);

struct DemoEntry {
  std::string id;
  std::string file;  // relative to the dataset root
  std::string scene_id;
  PlanarPose dock;
  Provenance provenance;
  std::int64_t n_frames = 0;
  std::vector<std::uint64_t> frame_offsets;
  std::vector<Segment> segments;  // empty when unknown
};

struct Manifest {
  int point_count = 1024;
  bool binary_gripper = true;
  std::uint64_t fps_seed = 0;
  LabelTable labels;
  std::vector<std::string> scenes;
  std::vector<DemoEntry> demos;
  // Generation statistics that are a pure function of the inputs.
  std::string feasibility_json = "null";
  std::vector<std::string> errors;

  const DemoEntry* Find(const std::string& demo_id) const;
};

inline constexpr const char* kManifestFile = "manifest.json";

std::string ManifestToJson(const Manifest& manifest);
Manifest ManifestFromJson(const std::string& text);
void WriteManifest(const Manifest& manifest, const std::filesystem::path& dir);
Manifest ReadManifest(const std::filesystem::path& dir);

std::filesystem::path SceneFilePath(const std::filesystem::path& dir,
                                    const std::string& scene_id);
std::filesystem::path DemoFilePath(const std::filesystem::path& dir,
                                   const std::string& demo_id);

// Writes demos/<id>.bin under `dir` and returns the manifest entry.
DemoEntry WriteDatasetDemo(const std::filesystem::path& dir,
                           const Demonstration& demo,
                           std::vector<Segment> segments = {});
Demonstration ReadDatasetDemo(const std::filesystem::path& dir,
                              const DemoEntry& entry);

}  // namespace dockaug

#endif  // DOCKAUG_DEMO_IO_H_
