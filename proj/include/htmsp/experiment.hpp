#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "htmsp/binary_frame.hpp"
#include "htmsp/dataset.hpp"
#include "htmsp/encoder.hpp"
#include "htmsp/linear_model.hpp"
#include "htmsp/parallel_backend.hpp"
#include "htmsp/sp_config.hpp"
#include "htmsp/spatial_pooler.hpp"

namespace htmsp {

enum class Mode { single_htm, multi_htm, svm_only };
enum class Backend { sequential, parallel };
enum class SweepParam { num_columns, synapses_per_column, min_overlap, winners_set_size };

std::string_view mode_name(Mode m);
std::string_view backend_name(Backend b);
std::string_view sweep_param_name(SweepParam p);
/// Accepts both config spellings (single_htm) and CLI spellings (single, svm-only).
Mode parse_mode(std::string_view s);
Backend parse_backend(std::string_view s);
SweepParam parse_sweep_param(std::string_view s);

struct Sweep {
  SweepParam parameter = SweepParam::min_overlap;
  std::vector<int> values;
};

struct ExperimentConfig {
  SpConfig sp;
  EncoderConfig encoder;
  std::filesystem::path dataset_path;
  DatasetSpec dataset;
  Mode mode = Mode::single_htm;
  Backend backend = Backend::sequential;
  std::optional<Sweep> sweep;
  int trials = 1;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  int learning_epochs = 1;
  SvmHyper svm;
  int max_group_size = kDefaultMaxGroupSize;
  int lanes = 0;  // parallel backend worker lanes, 0 = hardware concurrency

  /// Throws ConfigError naming the field and the violated constraint.
  void validate() const;
};

/// Parses JSON config text. Unknown keys are rejected by name, parse errors
/// carry line and column.
ExperimentConfig parse_config(std::string_view text, std::string_view source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const ExperimentConfig& config);

/// `config` with one SP parameter replaced and re-validated.
ExperimentConfig with_parameter(const ExperimentConfig& config, SweepParam parameter, int value);

struct TrialSeeds {
  std::uint64_t sp = 0;
  std::uint64_t svm = 0;
};

TrialSeeds trial_seeds(std::uint64_t experiment_seed, int trial);

/// One video's frames after encoding, kept packed in memory.
struct EncodedVideo {
  std::string path;
  std::string label;
  Split split = Split::train;
  std::vector<PackedBits> frames;
};

/// Loads and encodes every manifest video. Missing or corrupt frames raise
/// InputError naming the video.
std::vector<EncodedVideo> encode_videos(const ExperimentConfig& config, const Manifest& manifest);

/// Drives one SP instance on either backend, emitting profile records.
class SpEngine {
 public:
  SpEngine(SpState state, Backend backend, int max_group_size = kDefaultMaxGroupSize, int lanes = 0);

  std::vector<int> step(const BinaryFrame& frame, bool learning, std::vector<ProfileRecord>* sink);

  const SpState& state() const { return state_; }
  SpState& state() { return state_; }
  Backend backend() const { return backend_; }

 private:
  SpState state_;
  Backend backend_;
  int max_group_size_;
  int lanes_;
  std::unique_ptr<ParallelBackend> parallel_;
};

/// Optional pass-through stages around the SP. `decoder` sees every SP output
/// of the inference pass; `keep_learning` is consulted before each learning
/// epoch after the first.
struct PipelineHooks {
  std::function<void(std::string_view video, int frame, std::span<const int> active)> decoder;
  std::function<bool(const SpState& state, int epoch)> keep_learning;
};

/// Mean per-frame phase durations, warm-up step excluded.
struct TimingSummary {
  double staging_in_ns = 0.0;
  double kernel_overlap_ns = 0.0;
  double kernel_inhibition_ns = 0.0;
  double staging_out_ns = 0.0;
  std::int64_t steps = 0;
  std::optional<double> overlap_share;

  double kernel_ns() const { return kernel_overlap_ns + kernel_inhibition_ns; }
  double total_ns() const { return staging_in_ns + kernel_ns() + staging_out_ns; }
};

TimingSummary summarize_timing(std::span<const ProfileRecord> records, Backend backend);

struct TrialResult {
  nlohmann::json report;  // deterministic: config, seeds, confusion matrix, F1
  double f1 = 0.0;
  std::vector<ProfileRecord> records;
  TimingSummary timing;
};

TrialResult run_trial(const ExperimentConfig& config, int trial, std::span<const EncodedVideo> videos,
                      const PipelineHooks& hooks = {});

/// run_trial after loading the manifest and encoding the dataset.
TrialResult run_trial(const ExperimentConfig& config, int trial = 0);

struct ExperimentSummary {
  std::vector<TrialResult> trials;
  double f1_mean = 0.0;
  double f1_std = 0.0;
};

/// All trials of `config`, writing trial_NNN.json, profile_NNN.csv and
/// summary.json into config.output_dir.
ExperimentSummary run_experiment(const ExperimentConfig& config);

struct SweepRow {
  std::string param;
  int value = 0;
  Backend backend = Backend::sequential;
  double f1_mean = 0.0;
  double f1_std = 0.0;
  double kernel_ns = 0.0;
  double staging_in_ns = 0.0;
  double staging_out_ns = 0.0;
  double speedup_kernel = 1.0;
  double speedup_total = 1.0;
  std::optional<double> overlap_share;
  int failed_trials = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  nlohmann::json details;
};

inline constexpr std::string_view kSweepCsvHeader =
    "param,value,backend,f1_mean,f1_std,kernel_ns,staging_in_ns,staging_out_ns,speedup_kernel,"
    "speedup_total,overlap_share";

/// Every sweep value on both backends. Writes sweep_summary.csv,
/// sweep_report.json and per-point trial reports under config.output_dir.
SweepReport run_sweep(const ExperimentConfig& config);

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

double mean_of(std::span<const double> v);
/// Sample standard deviation (0 for fewer than two values).
double stddev_of(std::span<const double> v);

}  // namespace htmsp
