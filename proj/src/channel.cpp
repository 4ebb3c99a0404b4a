// SPDX-License-Identifier: Apache-2.0
#include "circle/channel.hpp"

#include <cmath>
#include <string>

#include "circle/error.hpp"

namespace circle {

ArrayGeometry ArrayGeometry::narrowband(std::size_t n_antennas, double carrier_freq_hz) {
  ArrayGeometry g;
  g.n_antennas = n_antennas;
  g.carrier_freq_hz = carrier_freq_hz;
  return g;
}

double ArrayGeometry::subcarrier_freq(std::size_t m) const {
  if (m >= n_subcarriers) {
    throw Error(ErrorCode::kIndexOutOfRange, "subcarrier " + std::to_string(m) + " of " +
                                                 std::to_string(n_subcarriers));
  }
  const double big_m = static_cast<double>(n_subcarriers);
  return carrier_freq_hz + bandwidth_hz * (2.0 * static_cast<double>(m) + 1.0 - big_m) / (2.0 * big_m);
}

double ArrayGeometry::wavelength_ratio(std::size_t m) const {
  return subcarrier_freq(m) / carrier_freq_hz;
}

double ArrayGeometry::rate_scale() const {
  return 1.0 / static_cast<double>(n_subcarriers + cp_len);
}

void ArrayGeometry::validate() const {
  if (n_antennas == 0 || n_subcarriers == 0) {
    throw Error(ErrorCode::kInvalidSize, "geometry needs at least one antenna and one subcarrier");
  }
  if (!(carrier_freq_hz > 0.0) || !(bandwidth_hz >= 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "carrier must be positive and bandwidth nonnegative");
  }
  if (!(subcarrier_freq(0) > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "lowest subcarrier frequency is not positive");
  }
}

CVector array_response(const ArrayGeometry& geometry, double theta, std::size_t m) {
  const double step = kPi * geometry.wavelength_ratio(m) * std::sin(theta);
  CVector a(geometry.n_antennas);
  for (std::size_t p = 0; p < geometry.n_antennas; ++p) {
    a(p) = std::polar(1.0, step * static_cast<double>(p));
  }
  return a;
}

ChannelProfile ChannelProfile::with_range(double rho, double nlos_var, std::size_t n_nlos) {
  ChannelProfile p;
  p.nlos_var = nlos_var;
  p.n_nlos = n_nlos;
  p.angle_start = 0.0;
  p.angle_span = rho * kPi;
  return p;
}

void materialize(const ArrayGeometry& geometry, ChannelRealization& channel) {
  const std::size_t big_m = geometry.n_subcarriers;
  channel.h.assign(big_m, CVector());
  for (std::size_t m = 0; m < big_m; ++m) {
    CVector h = channel.los_gain[m] * array_response(geometry, channel.los_aod, m);
    for (const NlosPath& path : channel.nlos_paths) {
      h += path.gain[m] * array_response(geometry, path.aod, m);
    }
    channel.h[m] = std::move(h);
  }
}

ChannelRealization sample_channel(const ArrayGeometry& geometry, std::size_t device, Rng& rng,
                                  const ChannelProfile& profile) {
  geometry.validate();
  const std::size_t big_m = geometry.n_subcarriers;
  ChannelRealization c;
  c.device = device;
  c.los_aod = rng.uniform(profile.angle_start, profile.angle_start + profile.angle_span);
  c.los_gain.resize(big_m);
  for (auto& g : c.los_gain) g = rng.complex_normal(profile.los_var);
  c.nlos_paths.resize(profile.n_nlos);
  for (NlosPath& path : c.nlos_paths) {
    path.aod = rng.uniform(profile.angle_start, profile.angle_start + profile.angle_span);
    path.gain.resize(big_m);
    for (auto& g : path.gain) g = rng.complex_normal(profile.nlos_var);
  }
  materialize(geometry, c);
  return c;
}

double snr_db(const NoiseModel& noise, const CVector& h) {
  if (!(noise.variance > 0.0)) {
    throw Error(ErrorCode::kUndefinedSnr, "noise variance must be positive");
  }
  const double rx = noise.tx_power * h.squaredNorm() / static_cast<double>(h.size());
  return 10.0 * std::log10(rx / noise.variance);
}

double tx_power_for_snr(double snr_db, double noise_variance, const ChannelProfile& profile) {
  return noise_variance * db_to_linear(snr_db) / profile.mean_gain();
}

}  // namespace circle
