// Command-line front end: dataset generation, trials, sweeps and reports.
//
//   htmsp generate --config exp.json
//   htmsp run      --config exp.json [--backend parallel] [--mode svm-only] [--out dir] [--seed 7]
//   htmsp sweep    --config exp.json [--out dir] [--seed 7]
//   htmsp report   --out dir
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "htmsp/dataset.hpp"
#include "htmsp/errors.hpp"
#include "htmsp/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config;
  std::string backend;
  std::string mode;
  std::string out;
  std::optional<std::uint64_t> seed;
};

htmsp::ExperimentConfig resolve(const Overrides& o) {
  auto config = htmsp::load_config(o.config);
  if (!o.backend.empty()) config.backend = htmsp::parse_backend(o.backend);
  if (!o.mode.empty()) config.mode = htmsp::parse_mode(o.mode);
  if (!o.out.empty()) config.output_dir = o.out;
  if (o.seed) config.seed = *o.seed;
  config.validate();
  return config;
}

int cmd_generate(const Overrides& o) {
  auto config = htmsp::load_config(o.config);
  if (!o.out.empty()) config.dataset_path = o.out;
  if (o.seed) config.dataset.rng_seed = *o.seed;
  if (htmsp::dataset_matches(config.dataset, config.dataset_path)) {
    std::cout << "dataset at " << config.dataset_path << " is up to date\n";
    return 0;
  }
  const auto manifest = htmsp::build_dataset(config.dataset, config.dataset_path);
  std::cout << "wrote " << manifest.size() << " videos to " << config.dataset_path << '\n';
  return 0;
}

int cmd_run(const Overrides& o) {
  const auto config = resolve(o);
  const auto summary = htmsp::run_experiment(config);
  for (std::size_t t = 0; t < summary.trials.size(); ++t) {
    std::cout << "trial " << t << "  F1 " << std::fixed << std::setprecision(4) << summary.trials[t].f1 << '\n';
  }
  std::cout << "F1 mean " << summary.f1_mean << "  std " << summary.f1_std << '\n'
            << "reports in " << config.output_dir << '\n';
  return 0;
}

int cmd_sweep(const Overrides& o) {
  const auto config = resolve(o);
  const auto report = htmsp::run_sweep(config);
  htmsp::write_sweep_csv(std::cout, report.rows);
  std::cout << "summary in " << (config.output_dir / "sweep_summary.csv") << '\n';
  return 0;
}

int cmd_report(const Overrides& o) {
  const fs::path dir = o.out.empty() ? fs::path("out") : fs::path(o.out);
  if (fs::exists(dir / "sweep_summary.csv")) {
    std::ifstream in(dir / "sweep_summary.csv");
    std::cout << in.rdbuf();
    return 0;
  }
  std::vector<fs::path> reports;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    const auto name = e.path().filename().string();
    if (name.starts_with("trial_") && e.path().extension() == ".json") reports.push_back(e.path());
  }
  if (ec) throw htmsp::InputError("cannot read " + dir.string() + ": " + ec.message());
  if (reports.empty()) throw htmsp::InputError("no trial reports in " + dir.string());
  std::sort(reports.begin(), reports.end());
  std::vector<double> f1s;
  for (const auto& path : reports) {
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    f1s.push_back(j.at("f1").get<double>());
    std::cout << path.filename().string() << "  mode " << j.at("config").at("mode").get<std::string>()
              << "  F1 " << std::fixed << std::setprecision(4) << f1s.back() << '\n';
  }
  std::cout << "mean " << htmsp::mean_of(f1s) << "  std " << htmsp::stddev_of(f1s) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HTM spatial pooler video classification harness"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", o.config, "experiment configuration (JSON)");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "seed override");
  };

  auto* generate = app.add_subcommand("generate", "render the synthetic shapes dataset");
  add_common(generate, true);
  auto* run = app.add_subcommand("run", "run the configured trials");
  add_common(run, true);
  run->add_option("--backend", o.backend, "sequential|parallel")->check(CLI::IsMember({"sequential", "parallel"}));
  run->add_option("--mode", o.mode, "single|multi|svm-only")->check(CLI::IsMember({"single", "multi", "svm-only"}));
  auto* sweep = app.add_subcommand("sweep", "parameter sweep on both backends");
  add_common(sweep, true);
  sweep->add_option("--mode", o.mode, "single|multi")->check(CLI::IsMember({"single", "multi"}));
  auto* report = app.add_subcommand("report", "summarize reports in an output directory");
  report->add_option("--out", o.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*generate) return cmd_generate(o);
    if (*run) return cmd_run(o);
    if (*sweep) return cmd_sweep(o);
    if (*report) return cmd_report(o);
  } catch (const htmsp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
