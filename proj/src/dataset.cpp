#include "htmsp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "htmsp/errors.hpp"
#include "htmsp/pgm.hpp"
#include "htmsp/random.hpp"
#include "htmsp/rasterizer.hpp"

namespace htmsp {
namespace fs = std::filesystem;
namespace {

constexpr std::uint64_t kSplitStream = 0x5b1f;

nlohmann::json spec_to_json(const DatasetSpec& spec) {
  return {{"classes", spec.classes},
          {"videos_per_class", spec.videos_per_class},
          {"frames_per_video", spec.frames_per_video},
          {"frame_width", spec.frame_width},
          {"frame_height", spec.frame_height},
          {"rng_seed", spec.rng_seed}};
}

std::string video_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "v%04d", index);
  return buf;
}

}  // namespace

void DatasetSpec::validate() const {
  if (classes.empty()) throw ConfigError("invalid DatasetSpec: classes must be non-empty");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    try {
      parse_shape(classes[i]);
    } catch (const InputError& e) {
      throw ConfigError(std::string("invalid DatasetSpec: ") + e.what());
    }
    if (std::find(classes.begin(), classes.begin() + static_cast<std::ptrdiff_t>(i), classes[i]) !=
        classes.begin() + static_cast<std::ptrdiff_t>(i)) {
      throw ConfigError("invalid DatasetSpec: duplicate class " + classes[i]);
    }
  }
  if (videos_per_class <= 0) throw ConfigError("invalid DatasetSpec: videos_per_class must be positive");
  if (frames_per_video <= 0) throw ConfigError("invalid DatasetSpec: frames_per_video must be positive");
  if (frame_width <= 0 || frame_height <= 0) {
    throw ConfigError("invalid DatasetSpec: frame dimensions must be positive");
  }
}

std::string frame_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%04d.pgm", index);
  return buf;
}

InstancePose instance_pose(std::uint64_t instance_seed) {
  Rng rng(instance_seed);
  InstancePose pose;
  pose.start_azimuth_deg = uniform_real(rng, 0.0, 360.0);
  pose.elevation_deg = 20.0 + uniform_real(rng, -15.0, 15.0);
  pose.scale = 1.0 + uniform_real(rng, -0.1, 0.1);
  return pose;
}

std::uint64_t video_seed(const DatasetSpec& spec, int class_index, int video_index) {
  return derive_seed(derive_seed(spec.rng_seed, static_cast<std::uint64_t>(class_index)),
                     static_cast<std::uint64_t>(video_index));
}

std::vector<GrayFrame> render_video(const std::string& class_id, std::uint64_t instance_seed,
                                    const DatasetSpec& spec) {
  if (std::find(spec.classes.begin(), spec.classes.end(), class_id) == spec.classes.end()) {
    throw InputError("class '" + class_id + "' is not part of the dataset");
  }
  const Mesh mesh = make_mesh(parse_shape(class_id));
  const InstancePose pose = instance_pose(instance_seed);
  std::vector<GrayFrame> frames;
  frames.reserve(spec.frames_per_video);
  for (int f = 0; f < spec.frames_per_video; ++f) {
    OrbitCamera camera;
    camera.azimuth_deg = pose.start_azimuth_deg + 360.0 * f / spec.frames_per_video;
    camera.elevation_deg = pose.elevation_deg;
    frames.push_back(render_mesh(mesh, camera, spec.frame_width, spec.frame_height, {}, pose.scale));
  }
  return frames;
}

Manifest make_manifest(const DatasetSpec& spec) {
  spec.validate();
  const int n_train = static_cast<int>(std::lround(0.8 * spec.videos_per_class));
  Manifest manifest;
  for (std::size_t ci = 0; ci < spec.classes.size(); ++ci) {
    std::vector<int> order(spec.videos_per_class);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(spec.rng_seed ^ kSplitStream, ci));
    shuffle_range(order.begin(), order.end(), rng);
    std::vector<Split> split(spec.videos_per_class, Split::test);
    for (int k = 0; k < n_train; ++k) split[order[k]] = Split::train;
    for (int v = 0; v < spec.videos_per_class; ++v) {
      manifest.push_back({spec.classes[ci] + "/" + video_name(v), spec.classes[ci], split[v]});
    }
  }
  return manifest;
}

Manifest build_dataset(const DatasetSpec& spec, const fs::path& root) {
  const Manifest manifest = make_manifest(spec);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw InputError("cannot create " + root.string() + ": " + ec.message());
  std::size_t entry = 0;
  for (std::size_t ci = 0; ci < spec.classes.size(); ++ci) {
    for (int v = 0; v < spec.videos_per_class; ++v, ++entry) {
      const fs::path dir = root / manifest[entry].path;
      fs::create_directories(dir, ec);
      if (ec) throw InputError("cannot create " + dir.string() + ": " + ec.message());
      const auto frames = render_video(spec.classes[ci], video_seed(spec, static_cast<int>(ci), v), spec);
      for (std::size_t f = 0; f < frames.size(); ++f) {
        write_pgm(dir / frame_file_name(static_cast<int>(f)), frames[f]);
      }
    }
  }
  write_manifest(manifest, root / "manifest.tsv");
  std::ofstream meta(root / "dataset.json");
  if (!meta) throw InputError("cannot write " + (root / "dataset.json").string());
  meta << spec_to_json(spec).dump(2) << '\n';
  return manifest;
}

bool dataset_matches(const DatasetSpec& spec, const fs::path& root) {
  std::ifstream meta(root / "dataset.json");
  if (!meta || !fs::exists(root / "manifest.tsv")) return false;
  try {
    return nlohmann::json::parse(meta) == spec_to_json(spec);
  } catch (const nlohmann::json::exception&) {
    return false;
  }
}

void write_manifest(const Manifest& manifest, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw InputError("cannot open " + file.string() + " for writing");
  out << "path\tclass\tsplit\n";
  for (const auto& v : manifest) out << v.path << '\t' << v.label << '\t' << split_name(v.split) << '\n';
  if (!out) throw InputError("failed writing " + file.string());
}

Manifest read_manifest(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open manifest " + file.string());
  std::string line;
  if (!std::getline(in, line) || line != "path\tclass\tsplit") {
    throw InputError(file.string() + ": missing manifest header");
  }
  Manifest manifest;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    VideoEntry v;
    std::string split;
    if (!std::getline(fields, v.path, '\t') || !std::getline(fields, v.label, '\t') ||
        !std::getline(fields, split)) {
      throw InputError(file.string() + ":" + std::to_string(line_no) + ": malformed manifest record");
    }
    if (split == "train") {
      v.split = Split::train;
    } else if (split == "test") {
      v.split = Split::test;
    } else {
      throw InputError(file.string() + ":" + std::to_string(line_no) + ": unknown split '" + split + "'");
    }
    manifest.push_back(std::move(v));
  }
  return manifest;
}

std::vector<fs::path> list_frames(const fs::path& video_dir) {
  std::vector<fs::path> frames;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(video_dir, ec)) {
    const auto name = e.path().filename().string();
    if (name.starts_with("frame_") && e.path().extension() == ".pgm") frames.push_back(e.path());
  }
  if (ec) throw InputError("cannot list " + video_dir.string() + ": " + ec.message());
  std::sort(frames.begin(), frames.end());
  return frames;
}

}  // namespace htmsp
