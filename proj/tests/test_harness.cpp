// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "circle/harness.hpp"
#include "support.hpp"

using namespace circle;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.n_devices = 4;
  c.q_levels = 32;
  c.n_subcarriers = 3;
  c.cp_len = 1;
  c.n_trials = 3;
  c.seed = 11;
  c.methods = {Method::kBound, Method::kCircle, Method::kRCircle, Method::kMrt, Method::kZf, Method::kWmmse};
  c.sweep = {"n_devices", {2.0, 4.0}};
  return c;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("csv layout") {
  CHECK(format_csv({}, "n_devices") == "trial,method,n_devices,sum_se,psi,wall_time_s\n");

  auto c = small_config();
  c.methods = {Method::kBound, Method::kCircle};
  c.sweep = {"n_devices", {}};
  const auto results = run_experiment(c);
  const std::string csv = format_csv(results, c.sweep.variable);
  const auto lines = lines_of(csv);
  CHECK(lines.size() == 7);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(lines[1].rfind("0,bound,4,", 0) == 0);
  CHECK(lines[2].rfind("0,circle,4,", 0) == 0);
  CHECK(lines[2].find(",792,0") != std::string::npos);  // psi = 3 (2*36 + 32*6)

  CHECK_ERROR_CODE(write_csv(results, "/nonexistent/dir/out.csv", "n_devices"), ErrorCode::kIo);
  try {
    write_csv(results, "/nonexistent/dir/out.csv", "n_devices");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/out.csv") != std::string::npos);
  }
}

TEST_CASE("results are consistent and deterministic") {
  const auto c = small_config();
  const auto a = run_experiment(c, {1, false});
  const auto b = run_experiment(c, {3, false});
  CHECK(format_csv(a, "n_devices") == format_csv(b, "n_devices"));
  REQUIRE(a.size() == 2 * 3 * 6);
  for (const auto& r : a) {
    double sum = 0.0;
    for (double v : r.per_device_se) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - r.sum_se) < 1e-9);
    CHECK(r.per_device_se.size() == static_cast<std::size_t>(r.sweep_value));
    if (r.method == Method::kCircle) CHECK(r.q_star.size() == r.per_device_se.size() * 3);
    if (r.method == Method::kRCircle) CHECK(r.q_star.size() == r.per_device_se.size());
  }
  // Order: point, trial, method as configured.
  CHECK(a[0].method == Method::kBound);
  CHECK(a[5].method == Method::kWmmse);
  CHECK(a[6].trial_index == 1);
  CHECK(a[18].sweep_value == 4.0);

  // The estimate never beats the full-CSIR bound.
  std::map<std::pair<std::size_t, std::size_t>, double> bound;
  for (const auto& r : a) {
    if (r.method == Method::kBound) bound[{r.point_index, r.trial_index}] = r.sum_se;
  }
  for (const auto& r : a) {
    if (r.method == Method::kCircle || r.method == Method::kRCircle) {
      CHECK(r.sum_se <= bound[{r.point_index, r.trial_index}] + 1e-9);
    }
  }
}

TEST_CASE("summary matches a recomputation from the csv rows") {
  const auto c = small_config();
  const auto results = run_experiment(c);
  const auto lines = lines_of(format_csv(results, "n_devices"));
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f;
    std::istringstream row(lines[i]);
    for (std::string cell; std::getline(row, cell, ',');) f.push_back(cell);
    REQUIRE(f.size() == 6);
    groups[{f[1], f[2]}].push_back(std::stod(f[3]));
  }
  const auto summary = summarize(results);
  CHECK(summary.size() == groups.size());
  for (const auto& s : summary) {
    std::ostringstream key;
    key << s.sweep_value;
    const auto& xs = groups.at({std::string(to_string(s.method)), key.str()});
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (xs.size() - 1);
    CHECK(s.count == xs.size());
    CHECK(s.mean == doctest::Approx(mean).epsilon(1e-10));
    CHECK(s.std_error == doctest::Approx(std::sqrt(var / xs.size())).epsilon(1e-9));
  }
}

TEST_CASE("timing is opt-in") {
  auto c = small_config();
  c.n_trials = 1;
  for (const auto& r : run_experiment(c)) CHECK(r.wall_time_s == 0.0);
  bool any = false;
  for (const auto& r : run_experiment(c, {1, true})) any = any || r.wall_time_s > 0.0;
  CHECK(any);
}

TEST_CASE("validation happens before any trial") {
  auto c = small_config();
  c.sweep = {"n_devices", {2.0, 40.0}};
  c.n_antennas = 8;
  CHECK_ERROR_CODE(run_experiment(c), ErrorCode::kInvalidConfig);
  c = small_config();
  c.methods = {Method::kNoFeedback};
  CHECK_ERROR_CODE(run_experiment(c), ErrorCode::kUnavailable);
}

TEST_CASE("genie mode reaches the bound on nearly LoS channels") {
  auto c = preset("fig2");
  c.n_trials = 10;
  c.sweep.values = {-40.0};
  double circle = 0.0, bound = 0.0;
  for (const auto& r : run_experiment(c)) (r.method == Method::kBound ? bound : circle) += r.sum_se;
  CHECK(circle / bound > 0.99);
}

TEST_CASE("csit ordering at the default operating point") {
  ExperimentConfig c;
  c.n_devices = 6;
  c.n_subcarriers = 2;
  c.cp_len = 1;
  c.n_trials = 200;
  c.methods = {Method::kWmmse, Method::kZf, Method::kMrt};
  double w = 0.0, z = 0.0, m = 0.0;
  for (const auto& r : run_experiment(c)) {
    (r.method == Method::kWmmse ? w : r.method == Method::kZf ? z : m) += r.sum_se;
  }
  CHECK(w >= z);
  CHECK(w >= m);
}
