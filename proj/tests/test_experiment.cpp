#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "htmsp/errors.hpp"
#include "htmsp/experiment.hpp"

using namespace htmsp;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

class SmallDataset : public ::testing::Test {
 protected:
  static inline fs::path root;

  static void SetUpTestSuite() {
    root = fs::temp_directory_path() / "htmsp_experiment_test";
    fs::remove_all(root);
    fs::create_directories(root);
    build_dataset(small_config().dataset, root / "data");
  }
  static void TearDownTestSuite() { fs::remove_all(root); }

  static std::string config_text(const std::string& extra = "") {
    return R"({
  "sp": {"num_columns": 128, "synapses_per_column": 32, "min_overlap": 2,
         "winners_set_size": 8, "initial_inhibition_radius": 16, "duty_cycle_period": 20},
  "encoder": {"target_width": 48, "target_height": 32, "block_size": 5},
  "dataset": {"path": ")" + (root / "data").generic_string() + R"(",
              "classes": ["cube", "sphere", "torus"], "videos_per_class": 5,
              "frames_per_video": 4, "frame_width": 48, "frame_height": 32, "rng_seed": 3},
  "classifier": {"epochs": 20},
  "parallel": {"lanes": 2},
  "output_dir": ")" + (root / "out").generic_string() + "\"" + extra + "\n}\n";
  }

  static ExperimentConfig small_config(const std::string& extra = "") {
    if (root.empty()) root = fs::temp_directory_path() / "htmsp_experiment_test";
    return parse_config(config_text(extra), "small.json");
  }
};

}  // namespace

TEST(Config, DefaultsFollowBaselineTable) {
  const auto c = parse_config(R"({"dataset": {"path": "shapes"}})");
  EXPECT_EQ(c.sp.num_columns, 2048);
  EXPECT_EQ(c.sp.synapses_per_column, 128);
  EXPECT_EQ(c.sp.min_overlap, 8);
  EXPECT_EQ(c.sp.winners_set_size, 40);
  EXPECT_DOUBLE_EQ(c.sp.perm_increment, 0.1);
  EXPECT_DOUBLE_EQ(c.sp.perm_decrement, 0.1);
  EXPECT_DOUBLE_EQ(c.sp.initial_permanence, 0.21);
  EXPECT_EQ(c.sp.initial_inhibition_radius, 80);
  EXPECT_EQ(c.sp.input_size, 240 * 134);
  EXPECT_EQ(c.mode, Mode::single_htm);
  EXPECT_EQ(c.backend, Backend::sequential);
  EXPECT_EQ(c.trials, 1);
  EXPECT_EQ(c.learning_epochs, 1);
}

TEST(Config, MissingFieldIsNamed) {
  EXPECT_NE(error_of("{}").find("dataset"), std::string::npos);
  EXPECT_NE(error_of(R"({"dataset": {}})").find("path"), std::string::npos);
  EXPECT_NE(error_of(R"({"dataset": {"path": "d"}, "sweep": {"values": [1]}})").find("parameter"), std::string::npos);
}

TEST(Config, InvariantBreachNamesFieldAndConstraint) {
  const auto msg = error_of(R"({"dataset": {"path": "d"}, "sp": {"min_overlap": 200}})");
  EXPECT_NE(msg.find("min_overlap"), std::string::npos) << msg;
  EXPECT_NE(error_of(R"({"dataset": {"path": "d"}, "sp": {"input_size": 100}})").find("input_size"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"dataset": {"path": "d"}, "trials": 0})").find("trials"), std::string::npos);
}

TEST(Config, UnknownKeysRejectedByName) {
  EXPECT_NE(error_of(R"({"dataset": {"path": "d"}, "sp": {"colums": 5}})").find("sp.colums"), std::string::npos);
  EXPECT_NE(error_of(R"({"dataset": {"path": "d"}, "verbose": true})").find("verbose"), std::string::npos);
  EXPECT_NE(error_of(R"({"dataset": {"path": "d"}, "sp": {"rng_seed": 5}})").find("rng_seed"), std::string::npos);
}

TEST(Config, ParseErrorCarriesPosition) {
  const auto msg = error_of("{\n  \"trials\": ,\n}");
  EXPECT_NE(msg.find("<config>:2:"), std::string::npos) << msg;
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, WrongTypeIsRejected) {
  EXPECT_NE(error_of(R"({"dataset": {"path": "d"}, "trials": "many"})").find("trials"), std::string::npos);
  EXPECT_NE(error_of(R"({"dataset": {"path": "d"}, "mode": "triple"})").find("triple"), std::string::npos);
}

TEST(Config, SweepValuesAreValidatedPerPoint) {
  EXPECT_FALSE(error_of(R"({"dataset": {"path": "d"},
                            "sweep": {"parameter": "min_overlap", "values": [2, 500]}})")
                   .empty());
  EXPECT_FALSE(error_of(R"({"dataset": {"path": "d"}, "mode": "svm_only",
                            "sweep": {"parameter": "min_overlap", "values": [2]}})")
                   .empty());
  const auto ok = parse_config(R"({"dataset": {"path": "d"},
                                   "sweep": {"parameter": "synapses_per_column", "values": [32, 64]}})");
  ASSERT_TRUE(ok.sweep);
  EXPECT_EQ(ok.sweep->parameter, SweepParam::synapses_per_column);
}

TEST(Config, JsonRoundTrip) {
  const auto c = parse_config(R"({"dataset": {"path": "d"}, "mode": "multi_htm", "backend": "parallel",
                                  "seed": 42, "sp": {"num_columns": 512}})");
  auto j = config_to_json(c);
  EXPECT_EQ(config_to_json(parse_config(j.dump())), j);
}

TEST(Config, WithParameterChangesOneField) {
  const auto c = parse_config(R"({"dataset": {"path": "d"}})");
  const auto d = with_parameter(c, SweepParam::winners_set_size, 10);
  EXPECT_EQ(d.sp.winners_set_size, 10);
  auto a = config_to_json(c), b = config_to_json(d);
  b["sp"]["winners_set_size"] = a["sp"]["winners_set_size"];
  EXPECT_EQ(a, b);
  EXPECT_THROW(with_parameter(c, SweepParam::min_overlap, 129), ConfigError);
}

TEST(Seeds, DistinctPerTrial) {
  std::set<std::uint64_t> seen;
  for (int t = 0; t < 20; ++t) {
    const auto s = trial_seeds(7, t);
    seen.insert(s.sp);
    seen.insert(s.svm);
  }
  EXPECT_EQ(seen.size(), 40u);
  EXPECT_EQ(trial_seeds(7, 3).sp, trial_seeds(7, 3).sp);
}

TEST(Statistics, MeanAndSampleStddev) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(mean_of(v), 2.5);
  EXPECT_NEAR(stddev_of(v), 1.2909944487358056, 1e-12);
  EXPECT_EQ(stddev_of(std::vector<double>{5}), 0.0);
}

TEST_F(SmallDataset, AllModesProduceReports) {
  for (const char* mode : {"single_htm", "multi_htm", "svm_only"}) {
    const auto c = small_config(std::string(", \"mode\": \"") + mode + "\"");
    const auto r = run_trial(c, 0);
    EXPECT_GE(r.f1, 0.0) << mode;
    EXPECT_LE(r.f1, 1.0) << mode;
    EXPECT_EQ(r.report["train_videos"], 12) << mode;
    EXPECT_EQ(r.report["test_videos"], 3) << mode;
    EXPECT_EQ(r.report["classes"].size(), 3u);
    EXPECT_TRUE(r.report.contains("resolved_sp"));
    EXPECT_TRUE(r.report.contains("seeds"));
    if (std::string(mode) == "svm_only") EXPECT_TRUE(r.records.empty());
    else EXPECT_FALSE(r.records.empty());
  }
}

TEST_F(SmallDataset, BackendsAgreeOnResults) {
  const auto seq = run_trial(small_config(", \"backend\": \"sequential\""), 1);
  const auto par = run_trial(small_config(", \"backend\": \"parallel\""), 1);
  EXPECT_EQ(seq.f1, par.f1);
  EXPECT_EQ(seq.report["confusion_matrix"], par.report["confusion_matrix"]);
  EXPECT_EQ(seq.report["resolved_sp"], par.report["resolved_sp"]);
  EXPECT_TRUE(par.timing.overlap_share.has_value());
  EXPECT_GT(par.timing.staging_in_ns, 0.0);
  EXPECT_EQ(seq.timing.staging_in_ns, 0.0);
}

TEST_F(SmallDataset, RerunIsByteIdentical) {
  const auto c = small_config(", \"mode\": \"multi_htm\"");
  EXPECT_EQ(run_trial(c, 2).report.dump(), run_trial(c, 2).report.dump());
  EXPECT_NE(run_trial(c, 2).report["seeds"], run_trial(c, 3).report["seeds"]);
}

TEST_F(SmallDataset, HooksSeeEveryFrameAndCanStopLearning) {
  auto c = small_config(", \"learning_epochs\": 3");
  const auto manifest = read_manifest(c.dataset_path / "manifest.tsv");
  const auto videos = encode_videos(c, manifest);
  int decoded = 0;
  std::vector<int> asked;
  PipelineHooks hooks;
  hooks.decoder = [&](std::string_view, int, std::span<const int>) { ++decoded; };
  hooks.keep_learning = [&](const SpState&, int epoch) {
    asked.push_back(epoch);
    return false;
  };
  run_trial(c, 0, videos, hooks);
  // inference pass over all 15 videos, 4 frames each
  EXPECT_EQ(decoded, 15 * 4);
  EXPECT_EQ(asked, (std::vector<int>{1}));
}

TEST_F(SmallDataset, MissingFramesNameTheVideo) {
  const auto broken = root / "broken";
  fs::copy(root / "data", broken, fs::copy_options::recursive);
  fs::remove(broken / "sphere" / "v0002" / "frame_0001.pgm");
  auto c = small_config();
  c.dataset_path = broken;
  try {
    run_trial(c, 0);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("sphere/v0002"), std::string::npos) << e.what();
  }
}

TEST_F(SmallDataset, ExperimentWritesReportsAndSummary) {
  auto c = small_config(", \"trials\": 2, \"mode\": \"svm_only\"");
  c.output_dir = root / "exp";
  const auto s = run_experiment(c);
  ASSERT_EQ(s.trials.size(), 2u);
  EXPECT_TRUE(fs::exists(c.output_dir / "trial_000.json"));
  EXPECT_TRUE(fs::exists(c.output_dir / "trial_001.json"));
  EXPECT_TRUE(fs::exists(c.output_dir / "profile_001.csv"));
  const auto summary = nlohmann::json::parse(read_file(c.output_dir / "summary.json"));
  EXPECT_DOUBLE_EQ(summary["f1_mean"].get<double>(), s.f1_mean);
}

TEST_F(SmallDataset, SingleValueSweepWrapsTrial) {
  auto c = small_config(R"(, "sweep": {"parameter": "winners_set_size", "values": [6]})");
  c.output_dir = root / "sweep1";
  const auto report = run_sweep(c);
  ASSERT_EQ(report.rows.size(), 2u);
  auto point = with_parameter(c, SweepParam::winners_set_size, 6);
  point.sweep.reset();
  const auto direct = run_trial(point, 0);
  EXPECT_EQ(report.rows[0].f1_mean, direct.f1);
  EXPECT_EQ(report.rows[1].f1_mean, direct.f1);
  EXPECT_EQ(report.rows[0].speedup_kernel, 1.0);
  EXPECT_TRUE(report.rows[1].overlap_share.has_value());

  const auto csv = read_file(c.output_dir / "sweep_summary.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), kSweepCsvHeader);
  EXPECT_TRUE(fs::exists(c.output_dir / "winners_set_size_6" / "parallel" / "trial_000.json"));
}

TEST_F(SmallDataset, SweepLeavesOtherFieldsAlone) {
  auto c = small_config(R"(, "sweep": {"parameter": "min_overlap", "values": [1, 3]})");
  c.output_dir = root / "sweep2";
  const auto report = run_sweep(c);
  ASSERT_EQ(report.rows.size(), 4u);
  auto base = config_to_json(c);
  base.erase("sweep");
  for (const auto& p : report.details["points"]) {
    auto resolved = p["resolved_config"];
    EXPECT_EQ(resolved["sp"]["min_overlap"], p["value"]);
    resolved["sp"]["min_overlap"] = base["sp"]["min_overlap"];
    resolved["backend"] = base["backend"];
    resolved["output_dir"] = base["output_dir"];
    EXPECT_EQ(resolved, base);
  }
  EXPECT_TRUE(report.details["trend"].contains("speedup_kernel_non_decreasing"));
}

TEST_F(SmallDataset, CliExitCodes) {
  const char* cli = std::getenv("HTMSP_CLI");
  if (!cli) GTEST_SKIP() << "HTMSP_CLI not set";
  const std::string exe = std::string("\"") + cli + "\"";
  auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const auto good = root / "cli.json";
  write_file(good, config_text(", \"mode\": \"svm_only\""));
  const auto bad = root / "bad.json";
  write_file(bad, R"({"dataset": {"path": "x"}, "sp": {"min_overlap": 999}})");
  const auto missing_data = root / "missing.json";
  write_file(missing_data, R"({"dataset": {"path": ")" + (root / "nowhere").generic_string() + R"("}})");

  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("run"), 1);
  EXPECT_EQ(run("run --config " + bad.string()), 1);
  EXPECT_EQ(run("run --config " + missing_data.string()), 2);
  EXPECT_EQ(run("run --config " + good.string() + " --mode bogus"), 1);
  EXPECT_EQ(run("run --config " + good.string() + " --out " + (root / "cli_out").string()), 0);
  EXPECT_TRUE(fs::exists(root / "cli_out" / "trial_000.json"));
  EXPECT_EQ(run("report --out " + (root / "cli_out").string()), 0);
  EXPECT_EQ(run("generate --config " + good.string() + " --out " + (root / "cli_data").string()), 0);
  EXPECT_TRUE(fs::exists(root / "cli_data" / "manifest.tsv"));
}
