// SPDX-License-Identifier: Apache-2.0
#include "circle/receiver.hpp"

#include <cmath>
#include <string>

#include "circle/error.hpp"

namespace circle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_noise(const NoiseModel& noise) {
  if (!(noise.variance > 0.0)) {
    throw Error(ErrorCode::kUndefinedSnr, "SINR needs a positive noise variance");
  }
}

void require_length(const CVector& v, std::size_t n, const char* what) {
  if (static_cast<std::size_t>(v.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " has length " + std::to_string(v.size()) + ", expected " + std::to_string(n));
  }
}

SinrReport make_report(double sinr, SinrKind kind, double cap = kDefaultSinrCap) {
  return {sinr, spectral_efficiency(sinr, cap), kind};
}

}  // namespace

CVector inverse_channel(const CVector& h) {
  CVector out(h.size());
  for (Eigen::Index p = 0; p < h.size(); ++p) {
    if (std::abs(h(p)) <= kDegenerateThreshold) {
      throw Error(ErrorCode::kDegenerateChannel, "channel entry " + std::to_string(p) + " is zero");
    }
    out(p) = 1.0 / std::conj(h(p));
  }
  return out;
}

Complex combine(const CVector& h_hat, const PermutedDftFamily& family, std::size_t k, const CVector& y) {
  require_length(h_hat, family.size(), "estimated channel");
  require_length(y, family.size(), "received block");
  const CVector h_inv = inverse_channel(h_hat);
  // h_inv^T (F_k^* y)
  const CVector folded = family.member(k).conjugate() * y;
  return (h_inv.transpose() * folded)(0);
}

Complex desired_gain(const CVector& h_true, const PermutedDftFamily& family, std::size_t k) {
  return desired_gain(h_true, family, k, h_true);
}

Complex desired_gain(const CVector& h_true, const PermutedDftFamily& family, std::size_t k,
                     const CVector& h_hat) {
  return interference_gain(h_true, family, k, k, h_hat);
}

Complex interference_gain(const CVector& h_true, const PermutedDftFamily& family, std::size_t k,
                          std::size_t k2) {
  return interference_gain(h_true, family, k, k2, h_true);
}

Complex interference_gain(const CVector& h_true, const PermutedDftFamily& family, std::size_t k,
                          std::size_t k2, const CVector& h_hat) {
  require_length(h_true, family.size(), "channel");
  const CVector h_inv = inverse_channel(h_hat);
  const CVector left = family.member(k).adjoint() * h_inv;             // (h_inv^T F_k^*)^T
  const CVector right = family.member(k2).transpose() * h_true.conjugate();  // F_k2^T h^*
  return (left.transpose() * right)(0);
}

CombinerOutput diagnose_combiner(const CVector& h_hat, const CVector& h_true, const PermutedDftFamily& family,
                                 std::size_t k, const ReceivedBlock& block) {
  CombinerOutput out;
  out.value = combine(h_hat, family, k, block);
  out.desired_gain = desired_gain(h_true, family, k, h_hat);
  out.interference_terms.assign(family.size(), Complex{});
  for (std::size_t k2 = 0; k2 < family.size(); ++k2) {
    if (k2 != k) out.interference_terms[k2] = interference_gain(h_true, family, k, k2, h_hat);
  }
  return out;
}

double spectral_efficiency(double sinr, double cap) {
  return std::log2(1.0 + std::min(sinr, cap));
}

SinrReport exact_sinr(const CVector& h, const NoiseModel& noise) {
  require_noise(noise);
  const CVector h_inv = inverse_channel(h);
  const double n = static_cast<double>(h.size());
  return make_report(noise.tx_power * n / (noise.variance * h_inv.squaredNorm()), SinrKind::kExactFullCsir);
}

SinrReport sinr_bound(const CVector& h, const NoiseModel& noise) {
  require_noise(noise);
  const double n = static_cast<double>(h.size());
  return make_report(noise.tx_power * h.squaredNorm() / (n * noise.variance), SinrKind::kBound);
}

SinrReport estimated_sinr(const CVector& h_hat, const PermutedDftFamily& family, const CVector& y,
                          Complex pilot_value, const NoiseModel& noise, double cap) {
  const std::size_t n = family.size();
  const Complex desired = std::sqrt(noise.tx_power * static_cast<double>(n)) * pilot_value;
  const Complex residual = combine(h_hat, family, n - 1, y) - desired;
  const double denom = std::norm(residual);
  const double sinr = denom == 0.0 ? kInf : std::norm(desired) / denom;
  return make_report(sinr, SinrKind::kEstimated, cap);
}

SinrReport achieved_sinr(const CVector& h_true, const CVector& h_hat, const PermutedDftFamily& family,
                         std::size_t k, const NoiseModel& noise, double cap) {
  const std::size_t n = family.size();
  require_length(h_true, n, "channel");
  const CVector h_inv = inverse_channel(h_hat);
  // ratio(p) = h_inv(p) conj(h(p)); every gain is a weighted sum of it, the
  // weights being the conjugated diagonal of F_k F_k2^H.
  const CVector ratio = h_inv.cwiseProduct(h_true.conjugate());
  double interference = 0.0;
  Complex desired{};
  for (std::size_t k2 = 0; k2 < n; ++k2) {
    const Complex v = family.cross_diagonal(k, k2).dot(ratio);  // dot() conjugates the left side
    if (k2 == k) {
      desired = v;
    } else {
      interference += std::norm(v);
    }
  }
  const double scale = noise.tx_power / static_cast<double>(n);
  const double denom = scale * interference + noise.variance * h_inv.squaredNorm();
  const double num = scale * std::norm(desired);
  const double sinr = denom == 0.0 ? (num == 0.0 ? 0.0 : kInf) : num / denom;
  return make_report(sinr, SinrKind::kAchieved, cap);
}

double max_se(const CVector& h, const NoiseModel& noise, BoundForm form) {
  require_noise(noise);
  const double n = form == BoundForm::kNarrowband ? static_cast<double>(h.size()) : 1.0;
  return std::log2(1.0 + noise.tx_power * h.squaredNorm() / (n * noise.variance));
}

double sum_se_max(std::span<const ChannelRealization> channels, const NoiseModel& noise,
                  const ArrayGeometry& geometry, BoundForm form) {
  double total = 0.0;
  for (const ChannelRealization& c : channels) {
    for (const CVector& h : c.h) total += max_se(h, noise, form);
  }
  return geometry.rate_scale() * total;
}

double sum_se_achieved(std::span<const std::vector<CVector>> estimates,
                       std::span<const ChannelRealization> channels, const PermutedDftFamily& family,
                       const NoiseModel& noise, const ArrayGeometry& geometry, double cap) {
  if (estimates.size() != channels.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one estimate list per device is required");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const ChannelRealization& c = channels[i];
    if (estimates[i].size() != c.h.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "estimate count differs from subcarrier count");
    }
    for (std::size_t m = 0; m < c.h.size(); ++m) {
      total += achieved_sinr(c.h[m], estimates[i][m], family, c.device, noise, cap).se_bits;
    }
  }
  return geometry.rate_scale() * total;
}

}  // namespace circle
