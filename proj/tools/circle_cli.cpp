// SPDX-License-Identifier: Apache-2.0
//
// circle run --preset fig5 --out fig5.csv
// circle run --config my.cfg --threads 4
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "circle/config.hpp"
#include "circle/error.hpp"
#include "circle/harness.hpp"

namespace {

void print_summary(const circle::ExperimentConfig& config, const std::vector<circle::TrialResult>& results) {
  std::printf("%-10s %-14s %8s %12s %10s\n", "method", config.sweep.variable.c_str(), "trials", "mean_se",
              "std_err");
  for (const auto& s : circle::summarize(results)) {
    std::printf("%-10s %-14.6g %8zu %12.6f %10.6f\n", std::string(circle::to_string(s.method)).c_str(),
                s.sweep_value, s.count, s.mean, s.std_error);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo sum spectral efficiency of CSIT-free circulant DFT precoding"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Run a preset or a config file and write per-trial CSV");
  std::string preset_name;
  std::string config_path;
  bool full = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out_path;
  std::size_t threads = 1;
  bool timing = false;
  bool quiet = false;

  auto* preset_opt = run->add_option("--preset", preset_name, "fig2, fig4a..fig4d, fig5 or fig6");
  auto* config_opt = run->add_option("--config", config_path, "key = value experiment file")->check(CLI::ExistingFile);
  preset_opt->excludes(config_opt);
  run->add_flag("--full", full, "Use 1000 trials per point");
  run->add_option("--seed", seed, "Master seed (CIRCLE_SEED overrides the config file, this overrides both)");
  run->add_option("--trials", trials, "Trials per sweep point")->check(CLI::PositiveNumber);
  run->add_option("--out", out_path, "CSV output path");
  run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--timing", timing, "Record wall time per method (makes the CSV run-dependent)");
  run->add_flag("--quiet", quiet, "Skip the summary table");

  CLI11_PARSE(app, argc, argv);

  try {
    circle::ExperimentConfig config;
    if (!preset_name.empty()) {
      config = circle::preset(preset_name, full);
    } else if (!config_path.empty()) {
      config = circle::load_config(config_path);
      if (full) config.n_trials = 1000;
    } else {
      std::cerr << "run: one of --preset or --config is required\n";
      return 2;
    }
    circle::apply_env_overrides(config);
    if (seed) config.seed = *seed;
    if (trials) config.n_trials = *trials;

    const auto results = circle::run_experiment(config, {threads, timing});
    if (!out_path.empty()) circle::write_csv(results, out_path, config.sweep.variable);
    if (!quiet) print_summary(config, results);
  } catch (const circle::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
