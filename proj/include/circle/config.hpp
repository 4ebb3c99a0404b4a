// SPDX-License-Identifier: Apache-2.0
//
// Experiment parameterization, figure presets and the key = value config
// file format.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "circle/baselines.hpp"
#include "circle/channel.hpp"
#include "circle/receiver.hpp"
#include "circle/transceiver.hpp"

namespace circle {

enum class Method {
  kCircle,      // per-subcarrier codebook search
  kRCircle,     // joint search across subcarriers
  kBound,       // full-CSIR performance bound
  kMrt,
  kZf,
  kWmmse,
  kNoFeedback,  // uplink-reconstruction baseline; not available in this build
};

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

/// genie: combine with the true channel; estimated: run the codebook search.
enum class CsirMode { kEstimated, kGenie };
enum class BoundSetting { kAuto, kNarrowband, kWideband };

struct SweepSpec {
  std::string variable = "n_devices";
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string name = "custom";
  /// Unset n_antennas means n_devices + 2; unset n_devices means n_antennas - 2.
  std::optional<std::size_t> n_antennas;
  std::optional<std::size_t> n_devices;
  /// Exactly one of snr_db / p_t_db drives the transmit power.
  std::optional<double> snr_db = 10.0;
  std::optional<double> p_t_db;
  double sigma2_db = -10.0;
  double delta2_db = -15.0;
  std::size_t n_nlos = 3;
  double rho = 2.0;
  std::size_t q_levels = 512;
  std::size_t n_subcarriers = 10;
  std::size_t cp_len = 4;
  double carrier_freq_hz = 100e9;
  double bandwidth_hz = 10e9;
  std::size_t n_trials = 200;
  std::uint64_t seed = 1;
  std::vector<Method> methods = {Method::kBound, Method::kCircle, Method::kRCircle};
  SymbolSource symbol_source = SymbolSource::kGaussian;
  CsitNormalization csit_normalization = CsitNormalization::kAmplitude;
  CsirMode csir = CsirMode::kEstimated;
  BoundSetting bound_form = BoundSetting::kAuto;
  double sinr_cap = kDefaultSinrCap;
  WmmseOptions wmmse;
  /// Empty values: a single point at the current n_devices.
  SweepSpec sweep;
};

/// One fully resolved sweep point.
struct ResolvedPoint {
  double sweep_value = 0.0;
  std::size_t n_antennas = 0;
  std::size_t n_devices = 0;
  ArrayGeometry geometry;
  ChannelProfile profile;
  NoiseModel noise;
  BoundForm bound_form = BoundForm::kNarrowband;
  std::size_t q_levels = 0;
};

/// Throws kInvalidConfig (or kUnavailable for unimplemented methods).
void validate(const ExperimentConfig& config);

/// Sweep values to iterate, never empty.
std::vector<double> sweep_values(const ExperimentConfig& config);
/// Applies one sweep value and derives every dependent quantity.
ResolvedPoint resolve(const ExperimentConfig& config, double sweep_value);

/// fig2, fig4a, fig4b, fig4c, fig4d, fig5, fig6. `full` switches to 10^3 trials.
ExperimentConfig preset(std::string_view name, bool full = false);
std::vector<std::string> preset_names();

/// Parses `key = value` lines ('#' starts a comment). A `preset` key, if
/// present, supplies the starting values.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// CIRCLE_SEED, when set, replaces config.seed.
void apply_env_overrides(ExperimentConfig& config);

}  // namespace circle
