// SPDX-License-Identifier: Apache-2.0
#include "circle/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "circle/error.hpp"

namespace circle {
namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); }

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size()) config_error(key + ": '" + value + "' is not a number");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    config_error(key + ": '" + value + "' is not a nonnegative integer");
  }
  return v;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  return static_cast<std::size_t>(parse_u64(key, value));
}

std::optional<std::size_t> parse_optional_size(const std::string& key, const std::string& value) {
  if (value == "auto") return std::nullopt;
  return parse_size(key, value);
}

bool is_sweep_variable(std::string_view name) {
  static constexpr std::string_view kNames[] = {"n_devices", "n_antennas", "snr_db", "p_t_db",  "sigma2_db",
                                                "delta2_db", "rho",        "q_levels", "n_nlos"};
  return std::find(std::begin(kNames), std::end(kNames), name) != std::end(kNames);
}

void apply_sweep(ExperimentConfig& c, const std::string& variable, double value) {
  auto as_size = [&](double v) {
    if (!(v >= 0.0) || v != std::floor(v)) config_error(variable + " sweep value must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  };
  if (variable == "n_devices") {
    c.n_devices = as_size(value);
  } else if (variable == "n_antennas") {
    c.n_antennas = as_size(value);
  } else if (variable == "snr_db") {
    c.snr_db = value;
    c.p_t_db.reset();
  } else if (variable == "p_t_db") {
    c.p_t_db = value;
    c.snr_db.reset();
  } else if (variable == "sigma2_db") {
    c.sigma2_db = value;
  } else if (variable == "delta2_db") {
    c.delta2_db = value;
  } else if (variable == "rho") {
    c.rho = value;
  } else if (variable == "q_levels") {
    c.q_levels = as_size(value);
  } else if (variable == "n_nlos") {
    c.n_nlos = as_size(value);
  } else {
    config_error("unknown sweep variable '" + variable + "'");
  }
}

double current_value(const ExperimentConfig& c, const std::string& variable) {
  if (variable == "n_devices") {
    if (c.n_devices) return static_cast<double>(*c.n_devices);
    if (c.n_antennas && *c.n_antennas >= 2) return static_cast<double>(*c.n_antennas - 2);
    config_error("n_devices and n_antennas are both unset");
  }
  if (variable == "n_antennas") {
    if (c.n_antennas) return static_cast<double>(*c.n_antennas);
    if (c.n_devices) return static_cast<double>(*c.n_devices + 2);
    config_error("n_devices and n_antennas are both unset");
  }
  if (variable == "snr_db") return c.snr_db.value_or(NAN);
  if (variable == "p_t_db") return c.p_t_db.value_or(NAN);
  if (variable == "sigma2_db") return c.sigma2_db;
  if (variable == "delta2_db") return c.delta2_db;
  if (variable == "rho") return c.rho;
  if (variable == "q_levels") return static_cast<double>(c.q_levels);
  if (variable == "n_nlos") return static_cast<double>(c.n_nlos);
  config_error("unknown sweep variable '" + variable + "'");
}

bool uses_circle(const ExperimentConfig& c) {
  return std::any_of(c.methods.begin(), c.methods.end(),
                     [](Method m) { return m == Method::kCircle || m == Method::kRCircle; });
}

SymbolSource parse_source(const std::string& v) {
  if (v == "qpsk") return SymbolSource::kQpsk;
  if (v == "gaussian") return SymbolSource::kGaussian;
  config_error("symbol_source must be qpsk or gaussian");
}

CsitNormalization parse_normalization(const std::string& v) {
  if (v == "amplitude") return CsitNormalization::kAmplitude;
  if (v == "power") return CsitNormalization::kPower;
  config_error("csit_normalization must be amplitude or power");
}

CsirMode parse_csir(const std::string& v) {
  if (v == "genie") return CsirMode::kGenie;
  if (v == "estimated") return CsirMode::kEstimated;
  config_error("csir must be genie or estimated");
}

BoundSetting parse_bound(const std::string& v) {
  if (v == "auto") return BoundSetting::kAuto;
  if (v == "narrowband") return BoundSetting::kNarrowband;
  if (v == "wideband") return BoundSetting::kWideband;
  config_error("bound_form must be auto, narrowband or wideband");
}

ExperimentConfig wideband_defaults() {
  ExperimentConfig c;
  c.snr_db = 10.0;
  c.sigma2_db = -10.0;
  c.delta2_db = -15.0;
  c.n_nlos = 3;
  c.q_levels = 512;
  c.n_subcarriers = 10;
  c.cp_len = 4;
  c.carrier_freq_hz = 100e9;
  c.bandwidth_hz = 10e9;
  c.n_trials = 200;
  return c;
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kCircle: return "circle";
    case Method::kRCircle: return "r-circle";
    case Method::kBound: return "bound";
    case Method::kMrt: return "mrt";
    case Method::kZf: return "zf";
    case Method::kWmmse: return "wmmse";
    case Method::kNoFeedback: return "no-feedback";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kCircle, Method::kRCircle, Method::kBound, Method::kMrt, Method::kZf, Method::kWmmse,
                   Method::kNoFeedback}) {
    if (to_string(m) == name) return m;
  }
  config_error("unknown method '" + std::string(name) + "'");
}

std::vector<double> sweep_values(const ExperimentConfig& config) {
  if (!config.sweep.values.empty()) return config.sweep.values;
  return {current_value(config, config.sweep.variable)};
}

ResolvedPoint resolve(const ExperimentConfig& config, double sweep_value) {
  ExperimentConfig c = config;
  apply_sweep(c, c.sweep.variable, sweep_value);

  ResolvedPoint p;
  p.sweep_value = sweep_value;
  if (c.n_antennas && c.n_devices) {
    p.n_antennas = *c.n_antennas;
    p.n_devices = *c.n_devices;
  } else if (c.n_devices) {
    p.n_devices = *c.n_devices;
    p.n_antennas = *c.n_devices + 2;
  } else if (c.n_antennas) {
    if (*c.n_antennas < 2) config_error("n_antennas must be at least 2 when n_devices is derived from it");
    p.n_antennas = *c.n_antennas;
    p.n_devices = *c.n_antennas - 2;
  } else {
    config_error("set n_devices or n_antennas");
  }
  if (p.n_devices == 0) config_error("n_devices must be at least 1");
  if (uses_circle(c) && p.n_devices + 2 > p.n_antennas) {
    config_error("CIRCLE methods serve at most n_antennas - 2 devices");
  }
  if (p.n_devices > p.n_antennas) config_error("n_devices exceeds n_antennas");

  p.geometry.n_antennas = p.n_antennas;
  p.geometry.carrier_freq_hz = c.carrier_freq_hz;
  p.geometry.bandwidth_hz = c.bandwidth_hz;
  p.geometry.n_subcarriers = c.n_subcarriers;
  p.geometry.cp_len = c.cp_len;
  p.geometry.validate();

  if (!(c.rho > 0.0)) config_error("rho must be positive");
  p.profile = ChannelProfile::with_range(c.rho, db_to_linear(c.delta2_db), c.n_nlos);

  p.noise.variance = db_to_linear(c.sigma2_db);
  if (c.p_t_db) {
    p.noise.tx_power = db_to_linear(*c.p_t_db);
  } else {
    p.noise.tx_power = tx_power_for_snr(*c.snr_db, p.noise.variance, p.profile);
  }

  switch (c.bound_form) {
    case BoundSetting::kAuto:
      p.bound_form = c.n_subcarriers == 1 ? BoundForm::kNarrowband : BoundForm::kWideband;
      break;
    case BoundSetting::kNarrowband: p.bound_form = BoundForm::kNarrowband; break;
    case BoundSetting::kWideband: p.bound_form = BoundForm::kWideband; break;
  }
  if (c.q_levels == 0) config_error("q_levels must be positive");
  p.q_levels = c.q_levels;
  return p;
}

void validate(const ExperimentConfig& config) {
  if (config.n_trials == 0) config_error("n_trials must be at least 1");
  if (config.methods.empty()) config_error("no methods selected");
  for (Method m : config.methods) {
    if (m == Method::kNoFeedback) {
      throw Error(ErrorCode::kUnavailable,
                  "the uplink-reconstruction baseline without CSIT feedback is not implemented");
    }
  }
  std::vector<Method> sorted = config.methods;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) config_error("duplicate method");
  if (config.snr_db.has_value() == config.p_t_db.has_value()) {
    config_error("set exactly one of snr_db and p_t_db");
  }
  const double dbs[] = {config.sigma2_db, config.delta2_db, config.snr_db.value_or(0.0), config.p_t_db.value_or(0.0)};
  for (double v : dbs) {
    if (!std::isfinite(v)) config_error("dB fields must be finite");
  }
  if (!(config.sinr_cap > 0.0)) config_error("sinr_cap must be positive");
  if (config.wmmse.max_iters == 0 || !(config.wmmse.tol > 0.0)) config_error("invalid WMMSE options");
  if (!is_sweep_variable(config.sweep.variable)) config_error("unknown sweep variable '" + config.sweep.variable + "'");
  for (double v : sweep_values(config)) {
    if (!std::isfinite(v)) config_error("sweep values must be finite");
    (void)resolve(config, v);
  }
}

ExperimentConfig preset(std::string_view name, bool full) {
  const std::vector<Method> wide_methods = {Method::kBound, Method::kRCircle, Method::kWmmse, Method::kZf,
                                            Method::kMrt};
  ExperimentConfig c;
  if (name == "fig2") {
    c.n_antennas = 32;
    c.n_devices = 30;
    c.snr_db.reset();
    c.p_t_db = 0.0;
    c.sigma2_db = -10.0;
    c.n_nlos = 3;
    c.rho = 2.0;
    c.q_levels = 512;
    c.n_subcarriers = 1;
    c.cp_len = 0;
    c.carrier_freq_hz = 100e9;
    c.bandwidth_hz = 0.0;
    c.n_trials = 200;
    c.methods = {Method::kBound, Method::kCircle};
    c.csir = CsirMode::kGenie;
    c.bound_form = BoundSetting::kNarrowband;
    c.sweep = {"delta2_db", {-40.0, -30.0, -20.0, -10.0, -5.0}};
  } else if (name == "fig4a" || name == "fig4b" || name == "fig4c" || name == "fig4d") {
    static const std::map<std::string_view, double> kRho = {
        {"fig4a", 1.0 / 32.0}, {"fig4b", 1.0 / 8.0}, {"fig4c", 0.5}, {"fig4d", 2.0}};
    c = wideband_defaults();
    c.rho = kRho.at(name);
    c.methods = {Method::kBound, Method::kCircle, Method::kRCircle};
    c.sweep = {"n_devices", {10.0, 20.0, 30.0}};
  } else if (name == "fig5") {
    c = wideband_defaults();
    c.rho = 2.0;
    c.methods = wide_methods;
    c.sweep = {"n_devices", {10.0, 20.0, 30.0}};
  } else if (name == "fig6") {
    c = wideband_defaults();
    c.rho = 2.0;
    c.n_devices = 30;
    c.n_antennas = 32;
    c.methods = wide_methods;
    c.sweep = {"snr_db", {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0}};
  } else {
    throw Error(ErrorCode::kUnknownPreset, "no preset named '" + std::string(name) + "'");
  }
  c.name = std::string(name);
  if (full) c.n_trials = 1000;
  return c;
}

std::vector<std::string> preset_names() { return {"fig2", "fig4a", "fig4b", "fig4c", "fig4d", "fig5", "fig6"}; }

ExperimentConfig parse_config(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::string> preset_name;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key == "preset") {
      preset_name = value;
    } else {
      entries.emplace_back(std::move(key), std::move(value));
    }
  }

  ExperimentConfig c = preset_name ? preset(*preset_name) : ExperimentConfig{};
  for (const auto& [key, value] : entries) {
    if (key == "name") {
      c.name = value;
    } else if (key == "n_antennas") {
      c.n_antennas = parse_optional_size(key, value);
    } else if (key == "n_devices") {
      c.n_devices = parse_optional_size(key, value);
    } else if (key == "snr_db") {
      c.snr_db = parse_double(key, value);
      c.p_t_db.reset();
    } else if (key == "p_t_db") {
      c.p_t_db = parse_double(key, value);
      c.snr_db.reset();
    } else if (key == "sigma2_db") {
      c.sigma2_db = parse_double(key, value);
    } else if (key == "delta2_db") {
      c.delta2_db = parse_double(key, value);
    } else if (key == "n_nlos") {
      c.n_nlos = parse_size(key, value);
    } else if (key == "rho") {
      c.rho = parse_double(key, value);
    } else if (key == "q_levels") {
      c.q_levels = parse_size(key, value);
    } else if (key == "n_subcarriers") {
      c.n_subcarriers = parse_size(key, value);
    } else if (key == "cp_len") {
      c.cp_len = parse_size(key, value);
    } else if (key == "carrier_freq_hz") {
      c.carrier_freq_hz = parse_double(key, value);
    } else if (key == "bandwidth_hz") {
      c.bandwidth_hz = parse_double(key, value);
    } else if (key == "n_trials") {
      c.n_trials = parse_size(key, value);
    } else if (key == "seed") {
      c.seed = parse_u64(key, value);
    } else if (key == "methods") {
      c.methods.clear();
      for (const auto& m : split_list(value)) c.methods.push_back(parse_method(m));
    } else if (key == "symbol_source") {
      c.symbol_source = parse_source(value);
    } else if (key == "csit_normalization") {
      c.csit_normalization = parse_normalization(value);
    } else if (key == "csir") {
      c.csir = parse_csir(value);
    } else if (key == "bound_form") {
      c.bound_form = parse_bound(value);
    } else if (key == "sinr_cap") {
      c.sinr_cap = parse_double(key, value);
    } else if (key == "wmmse_max_iters") {
      c.wmmse.max_iters = parse_size(key, value);
    } else if (key == "wmmse_tol") {
      c.wmmse.tol = parse_double(key, value);
    } else if (key == "sweep_variable") {
      if (!is_sweep_variable(value)) config_error("unknown sweep variable '" + value + "'");
      c.sweep.variable = value;
    } else if (key == "sweep_values") {
      c.sweep.values.clear();
      for (const auto& v : split_list(value)) c.sweep.values.push_back(parse_double(key, v));
    } else {
      config_error("unknown key '" + key + "'");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_env_overrides(ExperimentConfig& config) {
  if (const char* env = std::getenv("CIRCLE_SEED"); env != nullptr && *env != '\0') {
    config.seed = parse_u64("CIRCLE_SEED", trim(env));
  }
}

}  // namespace circle
