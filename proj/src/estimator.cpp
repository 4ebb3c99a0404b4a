// SPDX-License-Identifier: Apache-2.0
#include "circle/estimator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "circle/error.hpp"

namespace circle {
namespace {

void require_pilot(Complex pilot) {
  if (pilot == Complex{}) throw Error(ErrorCode::kInvalidPilot, "pilot symbol must be nonzero");
}

void require_q(std::size_t q, const Codebook& codebook) {
  if (q >= codebook.q_levels) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "codebook index " + std::to_string(q) + " of " + std::to_string(codebook.q_levels));
  }
}

Complex inner(const CVector& a, const CVector& b) {
  Complex acc{};
  for (Eigen::Index p = 0; p < a.size(); ++p) acc += a(p) * b(p);
  return acc;
}

EstimationResult make_result(const ScoreGrid& grid, std::size_t q_star, double score,
                             std::span<const std::size_t> rows, const Codebook& codebook) {
  EstimationResult r;
  r.device = grid.device;
  r.q_star = q_star;
  r.score = score;
  for (std::size_t row : rows) {
    const Complex alpha = grid.gain(row, q_star);
    r.alpha_hat.push_back(alpha);
    r.h_hat.push_back(alpha * codebook.vector(grid.subcarriers[row], q_star));
  }
  const std::size_t n = rows.empty() ? 0 : static_cast<std::size_t>(r.h_hat.front().size());
  r.multiply_count = complexity_psi(n, rows.size(), grid.q_levels);
  return r;
}

}  // namespace

Codebook build_codebook(const ArrayGeometry& geometry, std::size_t q_levels, AngularDomain domain) {
  if (q_levels == 0) throw Error(ErrorCode::kInvalidSize, "codebook needs at least one level");
  geometry.validate();
  Codebook cb;
  cb.q_levels = q_levels;
  cb.domain = domain;
  cb.angles.resize(q_levels);
  for (std::size_t q = 0; q < q_levels; ++q) {
    cb.angles[q] = domain.start + static_cast<double>(q) / static_cast<double>(q_levels) * domain.span;
  }
  cb.vectors.resize(geometry.n_subcarriers);
  cb.inverse_vectors.resize(geometry.n_subcarriers);
  for (std::size_t m = 0; m < geometry.n_subcarriers; ++m) {
    cb.vectors[m].reserve(q_levels);
    cb.inverse_vectors[m].reserve(q_levels);
    for (double angle : cb.angles) {
      cb.vectors[m].push_back(array_response(geometry, angle, m));
      cb.inverse_vectors[m].push_back(inverse_channel(cb.vectors[m].back()));
    }
  }
  return cb;
}

CandidateScorer::CandidateScorer(const ReceivedBlock& block, const PermutedDftFamily& family, PilotPair pilots,
                                 const NoiseModel& noise, double cap)
    : cap_(cap) {
  const std::size_t n = family.size();
  if (n < 3) throw Error(ErrorCode::kFrameTooSmall, "estimation needs two pilot slots and one symbol");
  if (static_cast<std::size_t>(block.y.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "received block length differs from family size");
  }
  require_pilot(pilots.first);
  require_pilot(pilots.second);
  fold_first_ = family.member(n - 2).conjugate() * block.y;
  fold_second_ = family.member(n - 1).conjugate() * block.y;
  const double amp = std::sqrt(noise.tx_power * static_cast<double>(n));
  first_reference_ = amp * pilots.first;
  second_reference_ = amp * pilots.second;
}

Complex CandidateScorer::gain(const CVector& inverse_response) const {
  // conj(alpha_hat) = d(a, F_{N-2}, y) / (sqrt(p_t N) s(N-2))
  return std::conj(inner(inverse_response, fold_first_) / first_reference_);
}

double CandidateScorer::score(const CVector& inverse_response, Complex alpha_hat) const {
  if (alpha_hat == Complex{}) return 0.0;
  // Combining with alpha_hat * a divides the unit-gain output by conj(alpha_hat).
  const Complex combined = inner(inverse_response, fold_second_) / std::conj(alpha_hat);
  const double residual = std::norm(combined - second_reference_);
  const double sinr = residual == 0.0 ? std::numeric_limits<double>::infinity()
                                      : std::norm(second_reference_) / residual;
  return spectral_efficiency(sinr, cap_);
}

Complex estimate_gain(std::size_t q, const ReceivedBlock& block, const PermutedDftFamily& family,
                      const Codebook& codebook, Complex pilot_first, const NoiseModel& noise) {
  require_q(q, codebook);
  const CandidateScorer scorer(block, family, {pilot_first, Complex{1.0, 0.0}}, noise);
  return scorer.gain(codebook.inverse_vectors.at(block.subcarrier)[q]);
}

double score_candidate(std::size_t q, const ReceivedBlock& block, const PermutedDftFamily& family,
                       const Codebook& codebook, Complex alpha_hat, Complex pilot_second,
                       const NoiseModel& noise, double cap) {
  require_q(q, codebook);
  const CandidateScorer scorer(block, family, {Complex{1.0, 0.0}, pilot_second}, noise, cap);
  return scorer.score(codebook.inverse_vectors.at(block.subcarrier)[q], alpha_hat);
}

ScoreGrid score_grid(std::span<const ReceivedBlock> blocks, const PermutedDftFamily& family,
                     const Codebook& codebook, std::span<const PilotPair> pilots, const NoiseModel& noise,
                     double cap) {
  if (blocks.empty()) throw Error(ErrorCode::kInvalidSize, "no received blocks to search");
  if (pilots.size() != blocks.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "one pilot pair per block is required");
  }
  ScoreGrid grid;
  grid.device = blocks.front().device;
  grid.q_levels = codebook.q_levels;
  grid.scores.resize(blocks.size() * codebook.q_levels);
  grid.gains.resize(blocks.size() * codebook.q_levels);
  for (std::size_t row = 0; row < blocks.size(); ++row) {
    const ReceivedBlock& block = blocks[row];
    if (block.device != grid.device) {
      throw Error(ErrorCode::kDimensionMismatch, "blocks of different devices cannot be searched jointly");
    }
    if (block.subcarrier >= codebook.inverse_vectors.size()) {
      throw Error(ErrorCode::kIndexOutOfRange, "codebook has no subcarrier " + std::to_string(block.subcarrier));
    }
    grid.subcarriers.push_back(block.subcarrier);
    const CandidateScorer scorer(block, family, pilots[row], noise, cap);
    const auto& inverses = codebook.inverse_vectors[block.subcarrier];
    for (std::size_t q = 0; q < codebook.q_levels; ++q) {
      const Complex alpha = scorer.gain(inverses[q]);
      grid.gains[row * grid.q_levels + q] = alpha;
      grid.scores[row * grid.q_levels + q] = scorer.score(inverses[q], alpha);
    }
  }
  return grid;
}

EstimationResult select_row(const ScoreGrid& grid, std::size_t row, const Codebook& codebook) {
  if (row >= grid.rows()) throw Error(ErrorCode::kIndexOutOfRange, "score grid row out of range");
  std::size_t best = 0;
  double best_score = grid.score(row, 0);
  for (std::size_t q = 1; q < grid.q_levels; ++q) {
    if (grid.score(row, q) > best_score) {
      best = q;
      best_score = grid.score(row, q);
    }
  }
  const std::size_t rows[] = {row};
  return make_result(grid, best, best_score, rows, codebook);
}

EstimationResult select_joint(const ScoreGrid& grid, const Codebook& codebook, const ArrayGeometry& geometry) {
  const double scale = geometry.rate_scale();
  auto mean_score = [&](std::size_t q) {
    double sum = 0.0;
    for (std::size_t row = 0; row < grid.rows(); ++row) sum += grid.score(row, q);
    return scale * sum;
  };
  std::size_t best = 0;
  double best_score = mean_score(0);
  for (std::size_t q = 1; q < grid.q_levels; ++q) {
    const double s = mean_score(q);
    if (s > best_score) {
      best = q;
      best_score = s;
    }
  }
  std::vector<std::size_t> rows(grid.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return make_result(grid, best, best_score, rows, codebook);
}

EstimationResult algorithm1(const ReceivedBlock& block, const PermutedDftFamily& family, const Codebook& codebook,
                            PilotPair pilots, const NoiseModel& noise, double cap) {
  const ScoreGrid grid = score_grid(std::span(&block, 1), family, codebook, std::span(&pilots, 1), noise, cap);
  return select_row(grid, 0, codebook);
}

EstimationResult algorithm2(std::span<const ReceivedBlock> blocks, const PermutedDftFamily& family,
                            const Codebook& codebook, std::span<const PilotPair> pilots, const NoiseModel& noise,
                            const ArrayGeometry& geometry, double cap) {
  return select_joint(score_grid(blocks, family, codebook, pilots, noise, cap), codebook, geometry);
}

std::uint64_t complexity_psi(std::uint64_t n_antennas, std::uint64_t n_subcarriers, std::uint64_t q_levels) {
  if (n_antennas == 0 || n_subcarriers == 0 || q_levels == 0) {
    throw Error(ErrorCode::kInvalidSize, "complexity count needs positive sizes");
  }
  std::uint64_t n2 = 0, qn = 0, inner_sum = 0, total = 0;
  if (__builtin_mul_overflow(n_antennas, n_antennas, &n2) || __builtin_mul_overflow(n2, 2ULL, &n2) ||
      __builtin_mul_overflow(q_levels, n_antennas, &qn) || __builtin_add_overflow(n2, qn, &inner_sum) ||
      __builtin_mul_overflow(n_subcarriers, inner_sum, &total)) {
    throw Error(ErrorCode::kOverflow, "complexity count exceeds 64 bits");
  }
  return total;
}

}  // namespace circle
