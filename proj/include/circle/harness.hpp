// SPDX-License-Identifier: Apache-2.0
//
// Seeded Monte Carlo runs over a sweep, per-trial results and CSV output.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "circle/config.hpp"

namespace circle {

struct TrialResult {
  std::size_t point_index = 0;
  std::size_t trial_index = 0;
  double sweep_value = 0.0;
  Method method = Method::kBound;
  double sum_se = 0.0;
  std::vector<double> per_device_se;
  /// Selected codebook index per device (CIRCLE: one per device and
  /// subcarrier, device-major). Empty for the other methods.
  std::vector<std::size_t> q_star;
  std::uint64_t psi = 0;
  double wall_time_s = 0.0;
};

struct RunOptions {
  std::size_t threads = 1;
  /// Off by default so that repeated runs give identical CSV bytes.
  bool timing = false;
};

/// Validates first, then runs every (sweep point, trial). Results come back
/// ordered by point, trial, then method in config order, whatever the number
/// of threads.
std::vector<TrialResult> run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

struct MethodSummary {
  double sweep_value = 0.0;
  Method method = Method::kBound;
  std::size_t count = 0;
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(count)
};

/// One entry per (point, method) in first-appearance order.
std::vector<MethodSummary> summarize(const std::vector<TrialResult>& results);

std::string format_csv(const std::vector<TrialResult>& results, const std::string& sweep_variable);
/// Throws kIo with the path on failure.
void write_csv(const std::vector<TrialResult>& results, const std::string& path,
               const std::string& sweep_variable);

}  // namespace circle
