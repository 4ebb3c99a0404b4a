// SPDX-License-Identifier: Apache-2.0
//
// Per-device linear combiner and the SINR / spectral-efficiency metrics built
// on it. The combiner for device k is d = h_inv^T F_k^* y with
// h_inv = 1 ./ conj(h_hat) and F_k the k-th permuted DFT member.
#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "circle/channel.hpp"
#include "circle/dft_core.hpp"
#include "circle/transceiver.hpp"
#include "circle/types.hpp"

namespace circle {

/// Entries closer than this to zero make the channel uninvertible.
inline constexpr double kDegenerateThreshold = 1e-12;
/// Cap applied to +inf SINR before taking log2(1 + sinr).
inline constexpr double kDefaultSinrCap = 1e30;

/// 1 ./ conj(h). Throws kDegenerateChannel on (near-)zero entries.
CVector inverse_channel(const CVector& h);

Complex combine(const CVector& h_hat, const PermutedDftFamily& family, std::size_t k, const CVector& y);
inline Complex combine(const CVector& h_hat, const PermutedDftFamily& family, std::size_t k,
                       const ReceivedBlock& block) {
  return combine(h_hat, family, k, block.y);
}

/// Desired-signal gain g = h_inv^T F_k^* F_k^T h^*, with h_inv built from
/// `h_hat` (defaults to the true channel). Equals N when h_hat == h.
Complex desired_gain(const CVector& h_true, const PermutedDftFamily& family, std::size_t k);
Complex desired_gain(const CVector& h_true, const PermutedDftFamily& family, std::size_t k,
                     const CVector& h_hat);
/// Leakage of slot k2 into device k's combiner; zero when h_hat == h.
Complex interference_gain(const CVector& h_true, const PermutedDftFamily& family, std::size_t k,
                          std::size_t k2);
Complex interference_gain(const CVector& h_true, const PermutedDftFamily& family, std::size_t k,
                          std::size_t k2, const CVector& h_hat);

/// Combiner output split into its desired and interference parts. Requires
/// ground truth, so it is only used for diagnostics and tests.
struct CombinerOutput {
  Complex value;
  Complex desired_gain;
  /// Indexed by slot; the entry for the device's own slot is zero.
  std::vector<Complex> interference_terms;
};

CombinerOutput diagnose_combiner(const CVector& h_hat, const CVector& h_true, const PermutedDftFamily& family,
                                 std::size_t k, const ReceivedBlock& block);

enum class SinrKind { kExactFullCsir, kEstimated, kBound, kAchieved };

struct SinrReport {
  double sinr = 0.0;
  double se_bits = 0.0;
  SinrKind kind = SinrKind::kBound;
};

/// log2(1 + min(sinr, cap)).
double spectral_efficiency(double sinr, double cap = kDefaultSinrCap);

/// Full-CSIR SINR: p_t N / (sigma^2 sum_p 1/|h_p|^2).
SinrReport exact_sinr(const CVector& h, const NoiseModel& noise);
/// Arithmetic-mean bound: p_t ||h||^2 / (N sigma^2). Never below exact_sinr.
SinrReport sinr_bound(const CVector& h, const NoiseModel& noise);

/// SINR from one received block, using the last pilot slot:
/// sinr = |P|^2 / |d - P|^2 with P = sqrt(p_t N) * pilot. Exact cancellation
/// yields +inf.
SinrReport estimated_sinr(const CVector& h_hat, const PermutedDftFamily& family, const CVector& y,
                          Complex pilot_value, const NoiseModel& noise, double cap = kDefaultSinrCap);

/// SINR actually delivered to device k when it combines with h_hat while the
/// true channel is h_true, averaged over unit-power symbols and noise.
SinrReport achieved_sinr(const CVector& h_true, const CVector& h_hat, const PermutedDftFamily& family,
                         std::size_t k, const NoiseModel& noise, double cap = kDefaultSinrCap);

/// Which SNR normalization the performance bound uses.
///   kNarrowband: log2(1 + p_t ||h||^2 / (N sigma^2)), reachable by CIRCLE on LoS channels.
///   kWideband:   log2(1 + p_t ||h||^2 / sigma^2), per-subcarrier bound as printed for OFDM.
enum class BoundForm { kNarrowband, kWideband };

double max_se(const CVector& h, const NoiseModel& noise, BoundForm form);

/// (1/(M + L_CP)) sum over devices and subcarriers of max_se.
double sum_se_max(std::span<const ChannelRealization> channels, const NoiseModel& noise,
                  const ArrayGeometry& geometry, BoundForm form);

/// (1/(M + L_CP)) sum of log2(1 + achieved_sinr). estimates[i][m] is the
/// estimate used by device channels[i].device on subcarrier m.
double sum_se_achieved(std::span<const std::vector<CVector>> estimates,
                       std::span<const ChannelRealization> channels, const PermutedDftFamily& family,
                       const NoiseModel& noise, const ArrayGeometry& geometry, double cap = kDefaultSinrCap);

}  // namespace circle
