// SPDX-License-Identifier: Apache-2.0
#include "circle/baselines.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "circle/error.hpp"

namespace circle {
namespace {

void normalize_columns(CMatrix& v, const CMatrix& fallback) {
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double norm = v.col(k).norm();
    if (norm > 0.0) {
      v.col(k) /= norm;
    } else {
      v.col(k) = fallback.col(k);
    }
  }
}

std::size_t n_subcarriers_of(std::span<const ChannelRealization> channels) {
  if (channels.empty()) throw Error(ErrorCode::kInvalidSize, "no devices to precode for");
  const std::size_t big_m = channels.front().h.size();
  for (const auto& c : channels) {
    if (c.h.size() != big_m) throw Error(ErrorCode::kDimensionMismatch, "devices differ in subcarrier count");
  }
  return big_m;
}

/// V = (A + mu I)^{-1} B with the smallest mu >= 0 meeting ||V||_F^2 <= budget.
CMatrix power_constrained_solve(const CMatrix& a, const CMatrix& b, double budget) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const CMatrix c = eig.eigenvectors().adjoint() * b;
  const Eigen::VectorXd row_power = c.rowwise().squaredNorm();
  const double floor = 1e-12 * std::max(1.0, lambda.cwiseAbs().maxCoeff());

  auto power = [&](double mu) {
    double p = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      const double d = lambda(i) + mu;
      if (d <= floor) {
        if (row_power(i) > 0.0) return std::numeric_limits<double>::infinity();
        continue;
      }
      p += row_power(i) / (d * d);
    }
    return p;
  };

  double mu = 0.0;
  if (power(0.0) > budget) {
    double lo = 0.0;
    double hi = std::sqrt(row_power.sum() / budget) + floor;
    while (power(hi) > budget) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (power(mid) > budget ? lo : hi) = mid;
    }
    mu = hi;
  }
  CMatrix scaled = c;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double d = lambda(i) + mu;
    scaled.row(i) = d <= floor ? CMatrix::Zero(1, c.cols()).row(0) : (c.row(i) / d).eval();
  }
  return eig.eigenvectors() * scaled;
}

}  // namespace

double csit_scale(std::size_t n_antennas, std::size_t n_devices, CsitNormalization normalization) {
  if (n_devices == 0) throw Error(ErrorCode::kInvalidSize, "no devices");
  const double ratio = static_cast<double>(n_antennas) / static_cast<double>(n_devices);
  return normalization == CsitNormalization::kAmplitude ? ratio : std::sqrt(ratio);
}

CMatrix stack_channels(std::span<const ChannelRealization> channels, std::size_t m) {
  if (channels.empty()) throw Error(ErrorCode::kInvalidSize, "no devices");
  const Eigen::Index n = channels.front().h.at(m).size();
  CMatrix h(n, static_cast<Eigen::Index>(channels.size()));
  for (std::size_t k = 0; k < channels.size(); ++k) {
    if (channels[k].h.at(m).size() != n) throw Error(ErrorCode::kDimensionMismatch, "channel lengths differ");
    h.col(static_cast<Eigen::Index>(k)) = channels[k].h[m];
  }
  return h;
}

CMatrix mrt_vectors(const CMatrix& channels) {
  CMatrix v = channels;
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double norm = v.col(k).norm();
    if (!(norm > 0.0)) throw Error(ErrorCode::kDegenerateChannel, "device " + std::to_string(k) + " has a zero channel");
    v.col(k) /= norm;
  }
  return v;
}

CMatrix zf_vectors(const CMatrix& channels) {
  if (channels.cols() > channels.rows()) {
    throw Error(ErrorCode::kSingularChannel, "zero forcing needs K <= N");
  }
  Eigen::ColPivHouseholderQR<CMatrix> qr(channels);
  qr.setThreshold(1e-10);
  if (qr.rank() < channels.cols()) {
    throw Error(ErrorCode::kSingularChannel, "stacked channel matrix is rank deficient");
  }
  const CMatrix gram = channels.adjoint() * channels;
  CMatrix v = channels * gram.ldlt().solve(CMatrix::Identity(gram.rows(), gram.cols()));
  for (Eigen::Index k = 0; k < v.cols(); ++k) v.col(k).normalize();
  return v;
}

double csit_rate(const CMatrix& channels, const CMatrix& vectors, double amplitude, double noise_variance) {
  // gains(k, j) = h_k^H v_j
  const CMatrix gains = channels.adjoint() * vectors;
  const double a2 = amplitude * amplitude;
  double total = 0.0;
  for (Eigen::Index k = 0; k < gains.rows(); ++k) {
    const double signal = a2 * std::norm(gains(k, k));
    const double interference = a2 * std::max(gains.row(k).squaredNorm() - std::norm(gains(k, k)), 0.0);
    total += std::log2(1.0 + signal / (interference + noise_variance));
  }
  return total;
}

WmmseSolution wmmse_vectors(const CMatrix& channels, double amplitude, double noise_variance,
                            const WmmseOptions& options) {
  if (!(noise_variance > 0.0)) throw Error(ErrorCode::kUndefinedSnr, "WMMSE needs a positive noise variance");
  const Eigen::Index n = channels.rows();
  const Eigen::Index k_count = channels.cols();
  const CMatrix g = amplitude * channels;  // effective channels
  const double budget = static_cast<double>(k_count);
  const CMatrix start = mrt_vectors(channels);

  CMatrix v = start;
  WmmseSolution sol;
  double current = csit_rate(g, v, 1.0, noise_variance);
  sol.objective_trace.push_back(current);
  CMatrix best = v;
  double best_rate = current;
  sol.converged = false;

  for (std::size_t it = 0; it < options.max_iters; ++it) {
    const CMatrix gains = g.adjoint() * v;  // (k, j) = g_k^H v_j
    CMatrix a = CMatrix::Zero(n, n);
    CMatrix b(n, k_count);
    for (Eigen::Index k = 0; k < k_count; ++k) {
      const double total = gains.row(k).squaredNorm() + noise_variance;
      const Complex u = gains(k, k) / total;
      const double mse = 1.0 - std::real(std::conj(u) * gains(k, k));
      const double w = 1.0 / std::max(mse, 1e-300);
      a += (w * std::norm(u)) * g.col(k) * g.col(k).adjoint();
      b.col(k) = (w * u) * g.col(k);
    }
    v = power_constrained_solve(a, b, budget);
    const double next = csit_rate(g, v, 1.0, noise_variance);
    sol.objective_trace.push_back(next);
    if (next > best_rate) {
      best_rate = next;
      best = v;
    }
    if (std::abs(next - current) < options.tol) {
      sol.converged = true;
      break;
    }
    current = next;
  }
  normalize_columns(best, start);
  sol.vectors = std::move(best);
  return sol;
}

CsitPrecoder mrt(std::span<const ChannelRealization> channels) {
  CsitPrecoder p;
  p.kind = CsitKind::kMrt;
  const std::size_t big_m = n_subcarriers_of(channels);
  for (std::size_t m = 0; m < big_m; ++m) p.vectors.push_back(mrt_vectors(stack_channels(channels, m)));
  return p;
}

CsitPrecoder zf(std::span<const ChannelRealization> channels) {
  CsitPrecoder p;
  p.kind = CsitKind::kZf;
  const std::size_t big_m = n_subcarriers_of(channels);
  for (std::size_t m = 0; m < big_m; ++m) p.vectors.push_back(zf_vectors(stack_channels(channels, m)));
  return p;
}

CsitPrecoder wmmse(std::span<const ChannelRealization> channels, const NoiseModel& noise,
                   CsitNormalization normalization, const WmmseOptions& options) {
  CsitPrecoder p;
  p.kind = CsitKind::kWmmse;
  const std::size_t big_m = n_subcarriers_of(channels);
  for (std::size_t m = 0; m < big_m; ++m) {
    const CMatrix h = stack_channels(channels, m);
    const double amp =
        csit_scale(static_cast<std::size_t>(h.rows()), channels.size(), normalization) * std::sqrt(noise.tx_power);
    WmmseSolution sol = wmmse_vectors(h, amp, noise.variance, options);
    p.converged = p.converged && sol.converged;
    p.vectors.push_back(std::move(sol.vectors));
    p.objective_trace.push_back(std::move(sol.objective_trace));
  }
  return p;
}

std::vector<double> csit_device_se(const CsitPrecoder& precoder, std::span<const ChannelRealization> channels,
                                   const NoiseModel& noise, const ArrayGeometry& geometry,
                                   CsitNormalization normalization) {
  const std::size_t big_m = n_subcarriers_of(channels);
  if (precoder.vectors.size() != big_m) {
    throw Error(ErrorCode::kDimensionMismatch, "precoder and channels differ in subcarrier count");
  }
  std::vector<double> per_device(channels.size(), 0.0);
  for (std::size_t m = 0; m < big_m; ++m) {
    const CMatrix h = stack_channels(channels, m);
    const CMatrix& v = precoder.vectors[m];
    if (v.rows() != h.rows() || v.cols() != h.cols()) {
      throw Error(ErrorCode::kDimensionMismatch, "precoder shape differs from channel stack");
    }
    const double amp =
        csit_scale(static_cast<std::size_t>(h.rows()), channels.size(), normalization) * std::sqrt(noise.tx_power);
    const double a2 = amp * amp;
    const CMatrix gains = h.adjoint() * v;
    for (Eigen::Index k = 0; k < gains.rows(); ++k) {
      const double signal = a2 * std::norm(gains(k, k));
      const double interference = a2 * (gains.row(k).squaredNorm() - std::norm(gains(k, k)));
      per_device[static_cast<std::size_t>(k)] += std::log2(1.0 + signal / (std::max(interference, 0.0) + noise.variance));
    }
  }
  for (double& se : per_device) se *= geometry.rate_scale();
  return per_device;
}

double csit_sum_se(const CsitPrecoder& precoder, std::span<const ChannelRealization> channels,
                   const NoiseModel& noise, const ArrayGeometry& geometry, CsitNormalization normalization) {
  double total = 0.0;
  for (double se : csit_device_se(precoder, channels, noise, geometry, normalization)) total += se;
  return total;
}

}  // namespace circle
