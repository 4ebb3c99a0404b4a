// SPDX-License-Identifier: Apache-2.0
//
// Precoders that assume genie CSIT at the base station, evaluated under the
// same power budget as the CSIT-free scheme: every device's unit-norm
// precoding vector is scaled by N/K (or sqrt(N/K) in power mode).
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "circle/channel.hpp"
#include "circle/types.hpp"

namespace circle {

enum class CsitKind { kMrt, kZf, kWmmse };
enum class CsitNormalization { kAmplitude, kPower };

struct WmmseOptions {
  std::size_t max_iters = 100;
  double tol = 1e-4;
};

struct CsitPrecoder {
  CsitKind kind = CsitKind::kMrt;
  std::vector<CMatrix> vectors;  // per subcarrier: N x K, unit-norm columns
  /// WMMSE only: false when some subcarrier hit max_iters first.
  bool converged = true;
  /// WMMSE only: per subcarrier, weighted sum rate after each iteration
  /// (entry 0 is the MRT starting point).
  std::vector<std::vector<double>> objective_trace;
};

/// Amplitude factor applied to every device's signal: N/K or sqrt(N/K).
double csit_scale(std::size_t n_antennas, std::size_t n_devices, CsitNormalization normalization);

/// N x K matrix whose column k is device k's channel on subcarrier m.
CMatrix stack_channels(std::span<const ChannelRealization> channels, std::size_t m);

CMatrix mrt_vectors(const CMatrix& channels);
/// Unit-norm columns of H (H^H H)^{-1}; kSingularChannel if rank-deficient.
CMatrix zf_vectors(const CMatrix& channels);

struct WmmseSolution {
  CMatrix vectors;  // unit-norm columns
  bool converged = true;
  std::vector<double> objective_trace;
};

/// Alternating MMSE-receiver / weight / precoder updates under a sum-power
/// budget of K, started from MRT, then per-device renormalization.
/// `amplitude` is the effective transmit amplitude (scale * sqrt(p_t)).
WmmseSolution wmmse_vectors(const CMatrix& channels, double amplitude, double noise_variance,
                            const WmmseOptions& options = {});

/// Sum over devices of log2(1 + SINR) for precoder columns `vectors` on one subcarrier.
double csit_rate(const CMatrix& channels, const CMatrix& vectors, double amplitude, double noise_variance);

CsitPrecoder mrt(std::span<const ChannelRealization> channels);
CsitPrecoder zf(std::span<const ChannelRealization> channels);
CsitPrecoder wmmse(std::span<const ChannelRealization> channels, const NoiseModel& noise,
                   CsitNormalization normalization = CsitNormalization::kAmplitude,
                   const WmmseOptions& options = {});

/// Per-device spectral efficiency, already scaled by 1/(M + L_CP).
std::vector<double> csit_device_se(const CsitPrecoder& precoder, std::span<const ChannelRealization> channels,
                                   const NoiseModel& noise, const ArrayGeometry& geometry,
                                   CsitNormalization normalization = CsitNormalization::kAmplitude);

double csit_sum_se(const CsitPrecoder& precoder, std::span<const ChannelRealization> channels,
                   const NoiseModel& noise, const ArrayGeometry& geometry,
                   CsitNormalization normalization = CsitNormalization::kAmplitude);

}  // namespace circle
