#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "htmsp/gray_frame.hpp"

namespace htmsp {

struct DatasetSpec {
  std::vector<std::string> classes = {"cone", "cube", "cylinder", "sphere", "torus", "cross"};
  int videos_per_class = 100;
  int frames_per_video = 32;
  int frame_width = 240;
  int frame_height = 134;
  std::uint64_t rng_seed = 2017;

  void validate() const;
  bool operator==(const DatasetSpec&) const = default;
};

enum class Split { train, test };

struct VideoEntry {
  std::string path;  // relative to the dataset root, e.g. "cube/v0007"
  std::string label;
  Split split = Split::train;

  bool operator==(const VideoEntry&) const = default;
};

using Manifest = std::vector<VideoEntry>;

/// Per-instance camera and size variation.
struct InstancePose {
  double start_azimuth_deg = 0.0;
  double elevation_deg = 20.0;
  double scale = 1.0;
};

InstancePose instance_pose(std::uint64_t instance_seed);

/// frames_per_video frames of one shape; the camera advances
/// 360 / frames_per_video degrees of azimuth per frame.
std::vector<GrayFrame> render_video(const std::string& class_id, std::uint64_t instance_seed,
                                    const DatasetSpec& spec);

std::uint64_t video_seed(const DatasetSpec& spec, int class_index, int video_index);

/// Train/test assignment: round(0.8 * videos_per_class) training videos per
/// class, drawn with the dataset seed.
Manifest make_manifest(const DatasetSpec& spec);

/// Renders every video to <root>/<class>/<video>/frame_NNNN.pgm and writes
/// <root>/manifest.tsv plus <root>/dataset.json.
Manifest build_dataset(const DatasetSpec& spec, const std::filesystem::path& root);

/// True when <root>/dataset.json describes `spec` and the manifest exists.
bool dataset_matches(const DatasetSpec& spec, const std::filesystem::path& root);

inline const char* split_name(Split s) { return s == Split::train ? "train" : "test"; }

void write_manifest(const Manifest& manifest, const std::filesystem::path& file);
Manifest read_manifest(const std::filesystem::path& file);

/// Frame files of one video directory, sorted by name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& video_dir);

std::string frame_file_name(int index);

}  // namespace htmsp
