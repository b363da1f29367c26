#include "htmsp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "htmsp/errors.hpp"
#include "htmsp/f1_metrics.hpp"
#include "htmsp/features.hpp"
#include "htmsp/pgm.hpp"
#include "htmsp/random.hpp"

namespace htmsp {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count();
}

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(label() + " must be a JSON object");
  }

  bool has(const char* key) {
    seen_.emplace_back(key);
    return j_.contains(key);
  }

  void require(const char* key) {
    if (!j_.contains(key)) throw ConfigError("missing required field '" + qualified(key) + "'");
  }

  void read(const char* key, int& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(qualified(key) + ": expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      throw ConfigError(qualified(key) + ": value out of range");
    }
    out = static_cast<int>(x);
  }

  void read(const char* key, std::uint64_t& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError(qualified(key) + ": expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void read(const char* key, double& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(qualified(key) + ": expected a number");
    out = v.get<double>();
  }

  void read(const char* key, std::string& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(qualified(key) + ": expected a string");
    out = v.get<std::string>();
  }

  void read(const char* key, std::vector<std::string>& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(qualified(key) + ": expected an array of strings");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError(qualified(key) + ": expected an array of strings");
      out.push_back(e.get<std::string>());
    }
  }

  void read(const char* key, std::vector<int>& out) {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(qualified(key) + ": expected an array of integers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number_integer()) throw ConfigError(qualified(key) + ": expected an array of integers");
      out.push_back(e.get<int>());
    }
  }

  std::optional<Section> child(const char* key) {
    if (!has(key)) return std::nullopt;
    return Section(j_.at(key), qualified(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) {
        throw ConfigError("unknown configuration key '" + qualified(key) + "'");
      }
    }
  }

 private:
  std::string label() const { return path_.empty() ? "configuration" : "'" + path_ + "'"; }
  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void read_sp(Section s, SpConfig& sp, bool& input_size_given) {
  s.read("num_columns", sp.num_columns);
  s.read("synapses_per_column", sp.synapses_per_column);
  s.read("min_overlap", sp.min_overlap);
  s.read("winners_set_size", sp.winners_set_size);
  s.read("perm_increment", sp.perm_increment);
  s.read("perm_decrement", sp.perm_decrement);
  s.read("initial_permanence", sp.initial_permanence);
  s.read("connected_threshold", sp.connected_threshold);
  s.read("initial_inhibition_radius", sp.initial_inhibition_radius);
  s.read("max_boost", sp.max_boost);
  s.read("duty_cycle_period", sp.duty_cycle_period);
  input_size_given = s.has("input_size");
  s.read("input_size", sp.input_size);
  s.finish();
}

void read_encoder(Section s, EncoderConfig& e) {
  s.read("target_width", e.target_width);
  s.read("target_height", e.target_height);
  s.read("block_size", e.block_size);
  s.read("bias_c", e.bias_c);
  s.read("gaussian_sigma", e.gaussian_sigma);
  s.finish();
}

void read_dataset(Section s, ExperimentConfig& c) {
  s.require("path");
  std::string path;
  s.read("path", path);
  c.dataset_path = path;
  s.read("classes", c.dataset.classes);
  s.read("videos_per_class", c.dataset.videos_per_class);
  s.read("frames_per_video", c.dataset.frames_per_video);
  s.read("frame_width", c.dataset.frame_width);
  s.read("frame_height", c.dataset.frame_height);
  s.read("rng_seed", c.dataset.rng_seed);
  s.finish();
}

json sp_to_json(const SpConfig& sp) {
  return {{"num_columns", sp.num_columns},
          {"synapses_per_column", sp.synapses_per_column},
          {"min_overlap", sp.min_overlap},
          {"winners_set_size", sp.winners_set_size},
          {"perm_increment", sp.perm_increment},
          {"perm_decrement", sp.perm_decrement},
          {"initial_permanence", sp.initial_permanence},
          {"connected_threshold", sp.connected_threshold},
          {"initial_inhibition_radius", sp.initial_inhibition_radius},
          {"max_boost", sp.max_boost},
          {"duty_cycle_period", sp.duty_cycle_period},
          {"input_size", sp.input_size}};
}

std::string trial_file(const char* stem, int trial, const char* ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(3) << std::setfill('0') << trial << ext;
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

std::size_t class_index(const ExperimentConfig& config, const std::string& label) {
  const auto& classes = config.dataset.classes;
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) throw InputError("video label '" + label + "' is not a configured class");
  return static_cast<std::size_t>(it - classes.begin());
}

ProfileContext profile_context(const ExperimentConfig& config) {
  return {std::string(backend_name(config.backend)), config.sp.num_columns, config.sp.synapses_per_column,
          config.sp.min_overlap, config.sp.winners_set_size};
}

}  // namespace

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::single_htm: return "single_htm";
    case Mode::multi_htm: return "multi_htm";
    case Mode::svm_only: return "svm_only";
  }
  return "unknown";
}

std::string_view backend_name(Backend b) {
  return b == Backend::sequential ? "sequential" : "parallel";
}

std::string_view sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::num_columns: return "num_columns";
    case SweepParam::synapses_per_column: return "synapses_per_column";
    case SweepParam::min_overlap: return "min_overlap";
    case SweepParam::winners_set_size: return "winners_set_size";
  }
  return "unknown";
}

Mode parse_mode(std::string_view s) {
  if (s == "single_htm" || s == "single") return Mode::single_htm;
  if (s == "multi_htm" || s == "multi") return Mode::multi_htm;
  if (s == "svm_only" || s == "svm-only") return Mode::svm_only;
  throw ConfigError("mode: unknown value '" + std::string(s) + "'");
}

Backend parse_backend(std::string_view s) {
  if (s == "sequential") return Backend::sequential;
  if (s == "parallel") return Backend::parallel;
  throw ConfigError("backend: unknown value '" + std::string(s) + "'");
}

SweepParam parse_sweep_param(std::string_view s) {
  for (auto p : {SweepParam::num_columns, SweepParam::synapses_per_column, SweepParam::min_overlap,
                 SweepParam::winners_set_size}) {
    if (sweep_param_name(p) == s) return p;
  }
  throw ConfigError("sweep.parameter: unknown parameter '" + std::string(s) + "'");
}

void ExperimentConfig::validate() const {
  sp.validate();
  encoder.validate();
  dataset.validate();
  if (trials <= 0) throw ConfigError("trials must be positive");
  if (learning_epochs <= 0) throw ConfigError("learning_epochs must be positive");
  if (!(svm.lambda > 0.0)) throw ConfigError("classifier.lambda must be positive");
  if (svm.epochs <= 0) throw ConfigError("classifier.epochs must be positive");
  if (max_group_size < 1 || (max_group_size & (max_group_size - 1)) != 0) {
    throw ConfigError("parallel.max_group_size must be a power of two");
  }
  if (encoder.target_width > dataset.frame_width || encoder.target_height > dataset.frame_height) {
    throw ConfigError("encoder target dimensions exceed the dataset frame dimensions");
  }
  if (sp.input_size != encoder.output_size()) {
    throw ConfigError("sp.input_size (" + std::to_string(sp.input_size) +
                      ") must equal encoder target_width * target_height (" +
                      std::to_string(encoder.output_size()) + ")");
  }
  if (sweep) {
    if (sweep->values.empty()) throw ConfigError("sweep.values must be non-empty");
    if (mode == Mode::svm_only) throw ConfigError("sweep requires an SP mode (single_htm or multi_htm)");
    for (int v : sweep->values) {
      try {
        auto copy = sp;
        switch (sweep->parameter) {
          case SweepParam::num_columns: copy.num_columns = v; break;
          case SweepParam::synapses_per_column: copy.synapses_per_column = v; break;
          case SweepParam::min_overlap: copy.min_overlap = v; break;
          case SweepParam::winners_set_size: copy.winners_set_size = v; break;
        }
        copy.validate();
      } catch (const ConfigError& e) {
        throw ConfigError("sweep value " + std::to_string(v) + " for " +
                          std::string(sweep_param_name(sweep->parameter)) + ": " + e.what());
      }
    }
  }
}

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": JSON parse error: " + e.what());
  }

  ExperimentConfig c;
  Section top(root, "");
  bool input_size_given = false;
  if (auto s = top.child("sp")) read_sp(*s, c.sp, input_size_given);
  if (auto s = top.child("encoder")) read_encoder(*s, c.encoder);
  top.require("dataset");
  read_dataset(*top.child("dataset"), c);

  std::string text_value;
  if (top.has("mode")) {
    top.read("mode", text_value);
    c.mode = parse_mode(text_value);
  }
  if (top.has("backend")) {
    top.read("backend", text_value);
    c.backend = parse_backend(text_value);
  }
  if (auto s = top.child("sweep")) {
    Sweep sweep;
    s->require("parameter");
    s->require("values");
    s->read("parameter", text_value);
    sweep.parameter = parse_sweep_param(text_value);
    s->read("values", sweep.values);
    s->finish();
    c.sweep = std::move(sweep);
  }
  top.read("trials", c.trials);
  if (top.has("output_dir")) {
    top.read("output_dir", text_value);
    c.output_dir = text_value;
  }
  top.read("seed", c.seed);
  top.read("learning_epochs", c.learning_epochs);
  if (auto s = top.child("classifier")) {
    s->read("lambda", c.svm.lambda);
    s->read("epochs", c.svm.epochs);
    s->finish();
  }
  if (auto s = top.child("parallel")) {
    s->read("max_group_size", c.max_group_size);
    s->read("lanes", c.lanes);
    s->finish();
  }
  top.finish();

  if (!input_size_given) c.sp.input_size = c.encoder.output_size();
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["sp"] = sp_to_json(c.sp);
  j["encoder"] = {{"target_width", c.encoder.target_width},
                  {"target_height", c.encoder.target_height},
                  {"block_size", c.encoder.block_size},
                  {"bias_c", c.encoder.bias_c},
                  {"gaussian_sigma", c.encoder.gaussian_sigma}};
  j["dataset"] = {{"path", c.dataset_path.generic_string()},
                  {"classes", c.dataset.classes},
                  {"videos_per_class", c.dataset.videos_per_class},
                  {"frames_per_video", c.dataset.frames_per_video},
                  {"frame_width", c.dataset.frame_width},
                  {"frame_height", c.dataset.frame_height},
                  {"rng_seed", c.dataset.rng_seed}};
  j["mode"] = mode_name(c.mode);
  j["backend"] = backend_name(c.backend);
  if (c.sweep) {
    j["sweep"] = {{"parameter", sweep_param_name(c.sweep->parameter)}, {"values", c.sweep->values}};
  }
  j["trials"] = c.trials;
  j["output_dir"] = c.output_dir.generic_string();
  j["seed"] = c.seed;
  j["learning_epochs"] = c.learning_epochs;
  j["classifier"] = {{"lambda", c.svm.lambda}, {"epochs", c.svm.epochs}};
  j["parallel"] = {{"max_group_size", c.max_group_size}, {"lanes", c.lanes}};
  return j;
}

ExperimentConfig with_parameter(const ExperimentConfig& config, SweepParam parameter, int value) {
  ExperimentConfig out = config;
  switch (parameter) {
    case SweepParam::num_columns: out.sp.num_columns = value; break;
    case SweepParam::synapses_per_column: out.sp.synapses_per_column = value; break;
    case SweepParam::min_overlap: out.sp.min_overlap = value; break;
    case SweepParam::winners_set_size: out.sp.winners_set_size = value; break;
  }
  out.sweep.reset();
  out.sp.validate();
  return out;
}

TrialSeeds trial_seeds(std::uint64_t experiment_seed, int trial) {
  const auto base = derive_seed(experiment_seed, static_cast<std::uint64_t>(trial));
  return {derive_seed(base, 1), derive_seed(base, 2)};
}

std::vector<EncodedVideo> encode_videos(const ExperimentConfig& config, const Manifest& manifest) {
  std::vector<EncodedVideo> videos;
  videos.reserve(manifest.size());
  for (const auto& entry : manifest) {
    class_index(config, entry.label);
    EncodedVideo v{entry.path, entry.label, entry.split, {}};
    const auto files = list_frames(config.dataset_path / entry.path);
    if (files.size() != static_cast<std::size_t>(config.dataset.frames_per_video)) {
      throw InputError("video " + entry.path + ": expected " + std::to_string(config.dataset.frames_per_video) +
                       " frames, found " + std::to_string(files.size()));
    }
    v.frames.reserve(files.size());
    for (const auto& file : files) {
      try {
        v.frames.emplace_back(encode_frame(read_pgm(file), config.encoder));
      } catch (const InputError& e) {
        throw InputError("video " + entry.path + ": " + e.what());
      }
    }
    videos.push_back(std::move(v));
  }
  return videos;
}

SpEngine::SpEngine(SpState state, Backend backend, int max_group_size, int lanes)
    : state_(std::move(state)), backend_(backend), max_group_size_(max_group_size), lanes_(lanes) {
  if (backend_ == Backend::parallel) parallel_ = std::make_unique<ParallelBackend>(lanes_);
}

std::vector<int> SpEngine::step(const BinaryFrame& frame, bool learning, std::vector<ProfileRecord>* sink) {
  std::vector<int> active;
  if (backend_ == Backend::sequential) {
    auto t0 = Clock::now();
    const auto overlaps = compute_overlap(state_, frame);
    const auto overlap_ns = elapsed_ns(t0);
    t0 = Clock::now();
    active = compute_inhibition(state_, overlaps);
    const auto inhibition_ns = elapsed_ns(t0);
    if (sink) {
      sink->push_back({Phase::kernel_overlap, overlap_ns, state_.iteration});
      sink->push_back({Phase::kernel_inhibition, inhibition_ns, state_.iteration});
    }
  } else {
    const auto plan = plan_kernels(state_.config, true, max_group_size_);
    auto result = parallel_->parallel_inhibition_fused(state_, frame, plan);
    commit_outputs(state_, result.overlaps, result.active);
    if (sink) sink->insert(sink->end(), result.records.begin(), result.records.end());
    active = std::move(result.active);
  }
  if (learning) learn(state_, frame, active);
  return active;
}

TimingSummary summarize_timing(std::span<const ProfileRecord> records, Backend backend) {
  const Phase first = backend == Backend::parallel ? Phase::staging_in : Phase::kernel_overlap;
  TimingSummary t;
  std::int64_t step = -1;
  std::vector<ProfileRecord> kept;
  for (const auto& r : records) {
    if (r.phase == first) ++step;
    if (step < 1) continue;  // warm-up
    kept.push_back(r);
    switch (r.phase) {
      case Phase::staging_in: t.staging_in_ns += static_cast<double>(r.duration_ns); break;
      case Phase::kernel_overlap: t.kernel_overlap_ns += static_cast<double>(r.duration_ns); break;
      case Phase::kernel_inhibition: t.kernel_inhibition_ns += static_cast<double>(r.duration_ns); break;
      case Phase::staging_out: t.staging_out_ns += static_cast<double>(r.duration_ns); break;
    }
  }
  t.steps = std::max<std::int64_t>(step, 0);
  if (t.steps > 0) {
    const auto n = static_cast<double>(t.steps);
    t.staging_in_ns /= n;
    t.kernel_overlap_ns /= n;
    t.kernel_inhibition_ns /= n;
    t.staging_out_ns /= n;
    if (backend == Backend::parallel) {
      try {
        t.overlap_share = overlap_share(kept);
      } catch (const ComputationError&) {
      }
    }
  }
  return t;
}

TrialResult run_trial(const ExperimentConfig& config, int trial, std::span<const EncodedVideo> videos,
                      const PipelineHooks& hooks) {
  const auto seeds = trial_seeds(config.seed, trial);
  SpConfig sp = config.sp;
  sp.rng_seed = seeds.sp;
  const auto& classes = config.dataset.classes;

  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    (videos[i].split == Split::train ? train : test).push_back(i);
  }
  for (std::size_t a : train) {
    for (std::size_t b : test) {
      if (videos[a].path == videos[b].path) throw InputError("video " + videos[a].path + " is in both splits");
    }
  }
  if (train.empty() || test.empty()) throw InputError("dataset needs both training and test videos");

  TrialResult result;
  std::vector<SdrHistogram> features(videos.size());
  BinaryFrame frame;

  // one SP per class in multi_htm, a single shared one otherwise
  std::vector<SpEngine> engines;
  if (config.mode == Mode::single_htm) {
    engines.emplace_back(init_sp(sp), config.backend, config.max_group_size, config.lanes);
  } else if (config.mode == Mode::multi_htm) {
    for (std::size_t k = 0; k < classes.size(); ++k) {
      SpConfig per_class = sp;
      per_class.rng_seed = derive_seed(seeds.sp, 100 + k);
      engines.emplace_back(init_sp(per_class), config.backend, config.max_group_size, config.lanes);
    }
  }

  if (config.mode == Mode::svm_only) {
    for (std::size_t i = 0; i < videos.size(); ++i) {
      HistogramAccumulator acc(config.sp.input_size);
      for (const auto& packed : videos[i].frames) {
        packed.unpack_into(frame);
        acc.add_bits(frame);
      }
      features[i] = acc.finish(config.dataset.frames_per_video);
    }
  } else {
    for (int epoch = 0; epoch < config.learning_epochs; ++epoch) {
      if (epoch > 0 && hooks.keep_learning && !hooks.keep_learning(engines.front().state(), epoch)) break;
      std::vector<std::size_t> order = train;
      Rng rng(derive_seed(seeds.sp, 1000 + static_cast<std::uint64_t>(epoch)));
      shuffle_range(order.begin(), order.end(), rng);
      for (std::size_t i : order) {
        auto& engine = config.mode == Mode::single_htm ? engines.front()
                                                        : engines[class_index(config, videos[i].label)];
        for (const auto& packed : videos[i].frames) {
          packed.unpack_into(frame);
          engine.step(frame, true, &result.records);
        }
      }
    }
    for (std::size_t i = 0; i < videos.size(); ++i) {
      std::vector<SdrHistogram> parts;
      for (auto& engine : engines) {
        HistogramAccumulator acc(engine.state().config.num_columns);
        for (std::size_t f = 0; f < videos[i].frames.size(); ++f) {
          videos[i].frames[f].unpack_into(frame);
          const auto active = engine.step(frame, false, &result.records);
          if (hooks.decoder) hooks.decoder(videos[i].path, static_cast<int>(f), active);
          acc.add_active(active);
        }
        parts.push_back(acc.finish(config.dataset.frames_per_video));
      }
      features[i] = concatenate(parts);
    }
  }

  std::vector<SdrHistogram> train_features;
  for (std::size_t i : train) {
    train_features.push_back(features[i]);
    train_features.back().label = videos[i].label;
  }
  const SvmHyper hyper{config.svm.lambda, config.svm.epochs, seeds.svm};
  const LinearModel model = train_classifier(train_features, hyper, classes);

  std::vector<std::size_t> truth;
  std::vector<std::size_t> assigned;
  for (std::size_t i : test) {
    truth.push_back(class_index(config, videos[i].label));
    assigned.push_back(predict_index(model, features[i].counts));
  }
  const auto counts = ConfusionCounts::from_labels(truth, assigned, classes.size());
  const auto f1 = f1_report(counts);

  SpConfig resolved_sp = sp;
  json report;
  report["trial"] = trial;
  report["config"] = config_to_json(config);
  report["resolved_sp"] = sp_to_json(resolved_sp);
  report["resolved_sp"]["rng_seed"] = resolved_sp.rng_seed;
  report["seeds"] = {{"experiment", config.seed}, {"sp", seeds.sp}, {"classifier", seeds.svm}};
  report["classes"] = classes;
  report["train_videos"] = train.size();
  report["test_videos"] = test.size();
  report["confusion_matrix"] = counts.n_ij;
  report["best_f"] = f1.best_f;
  report["f1"] = f1.f1;
  report["warnings"] = f1.warnings;

  result.report = std::move(report);
  result.f1 = f1.f1;
  result.timing = summarize_timing(result.records, config.backend);
  return result;
}

TrialResult run_trial(const ExperimentConfig& config, int trial) {
  config.validate();
  const auto manifest = read_manifest(config.dataset_path / "manifest.tsv");
  const auto videos = encode_videos(config, manifest);
  return run_trial(config, trial, videos);
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto manifest = read_manifest(config.dataset_path / "manifest.tsv");
  const auto videos = encode_videos(config, manifest);
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) throw InputError("cannot create " + config.output_dir.string() + ": " + ec.message());

  ExperimentSummary summary;
  std::vector<double> f1s;
  json per_trial = json::array();
  for (int t = 0; t < config.trials; ++t) {
    auto result = run_trial(config, t, videos);
    write_text(config.output_dir / trial_file("trial", t, ".json"), result.report.dump(2) + "\n");
    std::ostringstream csv;
    write_profile_csv(csv, result.records, profile_context(config));
    write_text(config.output_dir / trial_file("profile", t, ".csv"), csv.str());
    f1s.push_back(result.f1);
    per_trial.push_back({{"trial", t},
                         {"f1", result.f1},
                         {"kernel_ns", result.timing.kernel_ns()},
                         {"total_ns", result.timing.total_ns()}});
    result.records.clear();
    result.records.shrink_to_fit();
    summary.trials.push_back(std::move(result));
  }
  summary.f1_mean = mean_of(f1s);
  summary.f1_std = stddev_of(f1s);
  json agg = {{"config", config_to_json(config)},
              {"trials", per_trial},
              {"f1_mean", summary.f1_mean},
              {"f1_std", summary.f1_std}};
  write_text(config.output_dir / "summary.json", agg.dump(2) + "\n");
  return summary;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kSweepCsvHeader << '\n';
  out << std::setprecision(12);
  for (const auto& r : rows) {
    out << r.param << ',' << r.value << ',' << backend_name(r.backend) << ',' << r.f1_mean << ','
        << r.f1_std << ',' << r.kernel_ns << ',' << r.staging_in_ns << ',' << r.staging_out_ns << ','
        << r.speedup_kernel << ',' << r.speedup_total << ',';
    if (r.overlap_share) out << *r.overlap_share;
    out << '\n';
  }
}

SweepReport run_sweep(const ExperimentConfig& config) {
  config.validate();
  if (!config.sweep) throw ConfigError("configuration has no sweep section");
  const auto manifest = read_manifest(config.dataset_path / "manifest.tsv");
  const auto videos = encode_videos(config, manifest);
  const auto param = config.sweep->parameter;
  const std::string param_name(sweep_param_name(param));

  SweepReport report;
  json points = json::array();
  for (int value : config.sweep->values) {
    const ExperimentConfig point = with_parameter(config, param, value);
    TimingSummary sequential_timing;
    for (Backend backend : {Backend::sequential, Backend::parallel}) {
      ExperimentConfig run = point;
      run.backend = backend;
      run.output_dir = config.output_dir / (param_name + "_" + std::to_string(value)) / backend_name(backend);
      std::error_code ec;
      fs::create_directories(run.output_dir, ec);
      if (ec) throw InputError("cannot create " + run.output_dir.string() + ": " + ec.message());

      std::vector<double> f1s;
      std::vector<double> kernel, stage_in, stage_out, shares;
      json failures = json::array();
      json trial_f1 = json::array();
      for (int t = 0; t < run.trials; ++t) {
        try {
          auto result = run_trial(run, t, videos);
          write_text(run.output_dir / trial_file("trial", t, ".json"), result.report.dump(2) + "\n");
          std::ostringstream csv;
          write_profile_csv(csv, result.records, profile_context(run));
          write_text(run.output_dir / trial_file("profile", t, ".csv"), csv.str());
          f1s.push_back(result.f1);
          trial_f1.push_back(result.f1);
          kernel.push_back(result.timing.kernel_ns());
          stage_in.push_back(result.timing.staging_in_ns);
          stage_out.push_back(result.timing.staging_out_ns);
          if (result.timing.overlap_share) shares.push_back(*result.timing.overlap_share);
        } catch (const std::exception& e) {
          failures.push_back({{"trial", t}, {"error", e.what()}});
        }
      }

      SweepRow row;
      row.param = param_name;
      row.value = value;
      row.backend = backend;
      row.failed_trials = static_cast<int>(failures.size());
      if (f1s.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.f1_mean = row.f1_std = row.kernel_ns = row.staging_in_ns = row.staging_out_ns = nan;
        row.speedup_kernel = row.speedup_total = nan;
      } else {
        row.f1_mean = mean_of(f1s);
        row.f1_std = stddev_of(f1s);
        row.kernel_ns = mean_of(kernel);
        row.staging_in_ns = mean_of(stage_in);
        row.staging_out_ns = mean_of(stage_out);
        if (!shares.empty()) row.overlap_share = mean_of(shares);
        if (backend == Backend::sequential) {
          sequential_timing.kernel_overlap_ns = row.kernel_ns;
          sequential_timing.kernel_inhibition_ns = 0.0;
          sequential_timing.staging_in_ns = row.staging_in_ns;
          sequential_timing.staging_out_ns = row.staging_out_ns;
        } else {
          const double total = row.staging_in_ns + row.kernel_ns + row.staging_out_ns;
          row.speedup_kernel = sequential_timing.kernel_ns() / row.kernel_ns;
          row.speedup_total = sequential_timing.total_ns() / total;
        }
      }

      json resolved = config_to_json(run);
      json p = {{"value", value},
                {"backend", backend_name(backend)},
                {"resolved_config", resolved},
                {"trial_f1", trial_f1},
                {"failures", failures},
                {"f1_mean", row.f1_mean},
                {"f1_std", row.f1_std},
                {"kernel_ns", row.kernel_ns},
                {"staging_in_ns", row.staging_in_ns},
                {"staging_out_ns", row.staging_out_ns},
                {"speedup_kernel", row.speedup_kernel},
                {"speedup_total", row.speedup_total}};
      if (row.overlap_share) p["overlap_share"] = *row.overlap_share;
      points.push_back(std::move(p));
      report.rows.push_back(row);
    }
  }

  // recorded, not enforced: acceleration trend along the swept parameter
  std::vector<std::pair<int, double>> speedups;
  for (const auto& r : report.rows) {
    if (r.backend == Backend::parallel && std::isfinite(r.speedup_kernel)) speedups.emplace_back(r.value, r.speedup_kernel);
  }
  std::sort(speedups.begin(), speedups.end());
  bool non_decreasing = true;
  for (std::size_t i = 1; i < speedups.size(); ++i) non_decreasing &= speedups[i].second >= speedups[i - 1].second;

  report.details = {{"param", param_name},
                    {"values", config.sweep->values},
                    {"base_config", config_to_json(config)},
                    {"points", points},
                    {"trend", {{"speedup_kernel_non_decreasing", non_decreasing}}},
                    {"reference_overlap_share_range", {0.5, 0.75}}};

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  std::ostringstream csv;
  write_sweep_csv(csv, report.rows);
  write_text(config.output_dir / "sweep_summary.csv", csv.str());
  write_text(config.output_dir / "sweep_report.json", report.details.dump(2) + "\n");
  return report;
}

}  // namespace htmsp
