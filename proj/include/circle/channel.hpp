// SPDX-License-Identifier: Apache-2.0
//
// Uniform linear array (half-wavelength spacing at the carrier) with one LoS
// path and optional NLoS paths per device, narrowband or per OFDM subcarrier.
#pragma once

#include <cstddef>
#include <vector>

#include "circle/rng.hpp"
#include "circle/types.hpp"

namespace circle {

struct ArrayGeometry {
  std::size_t n_antennas = 1;
  double carrier_freq_hz = 100e9;
  double bandwidth_hz = 0.0;
  std::size_t n_subcarriers = 1;
  std::size_t cp_len = 0;

  static ArrayGeometry narrowband(std::size_t n_antennas, double carrier_freq_hz = 100e9);

  /// f_m = f_c + B (2m + 1 - M) / (2M) for zero-based m.
  double subcarrier_freq(std::size_t m) const;
  /// lambda_c / lambda_m = f_m / f_c.
  double wavelength_ratio(std::size_t m) const;
  /// 1 / (M + L_CP), the cyclic-prefix rate penalty.
  double rate_scale() const;
  void validate() const;
};

/// entry p = exp(i pi (lambda_c/lambda_m) p sin(theta)), p zero-based.
CVector array_response(const ArrayGeometry& geometry, double theta, std::size_t m = 0);

struct NlosPath {
  std::vector<Complex> gain;  // per subcarrier
  double aod = 0.0;
};

struct ChannelRealization {
  std::size_t device = 0;
  std::vector<Complex> los_gain;  // per subcarrier
  double los_aod = 0.0;
  std::vector<NlosPath> nlos_paths;
  std::vector<CVector> h;  // per subcarrier

  std::size_t n_subcarriers() const { return h.size(); }
};

/// Statistics of one device's channel. Angles are uniform on
/// [angle_start, angle_start + angle_span); the default is [0, 2 pi).
struct ChannelProfile {
  double los_var = 1.0;
  double nlos_var = 0.0;
  std::size_t n_nlos = 0;
  double angle_start = 0.0;
  double angle_span = 2.0 * kPi;

  /// Angular domain [0, rho * pi).
  static ChannelProfile with_range(double rho, double nlos_var = 0.0, std::size_t n_nlos = 0);
  /// E[||h||^2] / N.
  double mean_gain() const { return los_var + static_cast<double>(n_nlos) * nlos_var; }
};

/// Draws AoDs once (shared by all subcarriers) and gains i.i.d. per subcarrier.
ChannelRealization sample_channel(const ArrayGeometry& geometry, std::size_t device, Rng& rng,
                                  const ChannelProfile& profile);

/// Rebuilds h from the stored gains and angles.
void materialize(const ArrayGeometry& geometry, ChannelRealization& channel);

struct NoiseModel {
  double variance = 0.1;  // sigma^2
  double tx_power = 1.0;  // p_t
};

/// 10 log10(p_t ||h||^2 / (N sigma^2)): receive SNR for a unit-power precoded
/// transmission with unit-variance symbols.
double snr_db(const NoiseModel& noise, const CVector& h);

/// p_t giving the requested average SNR for channels drawn from `profile`.
double tx_power_for_snr(double snr_db, double noise_variance, const ChannelProfile& profile);

}  // namespace circle
