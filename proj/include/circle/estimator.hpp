// SPDX-License-Identifier: Apache-2.0
//
// Codebook search for the LoS channel of one device using the two pilot slots
// of the frame: the first pilot yields a complex-gain estimate per candidate
// angle, the second scores the candidate by its estimated spectral efficiency.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "circle/channel.hpp"
#include "circle/dft_core.hpp"
#include "circle/receiver.hpp"
#include "circle/transceiver.hpp"

namespace circle {

/// Angles start + q * span / Q, q = 0..Q-1.
struct AngularDomain {
  double start = -kPi;
  double span = 2.0 * kPi;

  static AngularDomain full() { return {}; }
  /// [0, rho * pi).
  static AngularDomain range(double rho) { return {0.0, rho * kPi}; }
};

struct Codebook {
  std::size_t q_levels = 0;
  AngularDomain domain;
  std::vector<double> angles;
  std::vector<std::vector<CVector>> vectors;          // [m][q]
  std::vector<std::vector<CVector>> inverse_vectors;  // [m][q], 1 ./ conj(vector)

  const CVector& vector(std::size_t m, std::size_t q) const { return vectors.at(m).at(q); }
};

/// One angle grid shared by every subcarrier; only the array response differs.
Codebook build_codebook(const ArrayGeometry& geometry, std::size_t q_levels,
                        AngularDomain domain = AngularDomain::full());

struct EstimationResult {
  std::size_t device = 0;
  std::size_t q_star = 0;
  std::vector<Complex> alpha_hat;  // per subcarrier covered by the search
  std::vector<CVector> h_hat;      // alpha_hat[m] * a_m(angle[q_star])
  double score = 0.0;
  std::uint64_t multiply_count = 0;
};

/// Precomputes F_{N-2}^* y and F_{N-1}^* y for one block so that each
/// candidate costs O(N).
class CandidateScorer {
 public:
  CandidateScorer(const ReceivedBlock& block, const PermutedDftFamily& family, PilotPair pilots,
                  const NoiseModel& noise, double cap = kDefaultSinrCap);

  /// Complex-gain estimate for a candidate, given 1 ./ conj(a).
  Complex gain(const CVector& inverse_response) const;
  /// log2(1 + estimated SINR) of the candidate alpha_hat * a.
  double score(const CVector& inverse_response, Complex alpha_hat) const;

 private:
  CVector fold_first_;
  CVector fold_second_;
  Complex first_reference_;
  Complex second_reference_;
  double cap_;
};

/// Gain estimate for codebook entry q on the block's subcarrier. Throws
/// kInvalidPilot for a zero pilot.
Complex estimate_gain(std::size_t q, const ReceivedBlock& block, const PermutedDftFamily& family,
                      const Codebook& codebook, Complex pilot_first, const NoiseModel& noise);

double score_candidate(std::size_t q, const ReceivedBlock& block, const PermutedDftFamily& family,
                       const Codebook& codebook, Complex alpha_hat, Complex pilot_second,
                       const NoiseModel& noise, double cap = kDefaultSinrCap);

/// Candidate scores and gain estimates for every (block, q).
struct ScoreGrid {
  std::size_t device = 0;
  std::size_t q_levels = 0;
  std::vector<std::size_t> subcarriers;  // subcarrier of each row
  std::vector<double> scores;            // row-major [row][q]
  std::vector<Complex> gains;            // row-major [row][q]

  std::size_t rows() const { return subcarriers.size(); }
  double score(std::size_t row, std::size_t q) const { return scores[row * q_levels + q]; }
  Complex gain(std::size_t row, std::size_t q) const { return gains[row * q_levels + q]; }
};

ScoreGrid score_grid(std::span<const ReceivedBlock> blocks, const PermutedDftFamily& family,
                     const Codebook& codebook, std::span<const PilotPair> pilots, const NoiseModel& noise,
                     double cap = kDefaultSinrCap);

/// Best candidate of a single row (one subcarrier searched on its own).
EstimationResult select_row(const ScoreGrid& grid, std::size_t row, const Codebook& codebook);
/// Best candidate by mean score over all rows, scaled by 1/(M + L_CP).
EstimationResult select_joint(const ScoreGrid& grid, const Codebook& codebook, const ArrayGeometry& geometry);

/// Narrowband search over the codebook. Ties keep the lowest index.
EstimationResult algorithm1(const ReceivedBlock& block, const PermutedDftFamily& family, const Codebook& codebook,
                            PilotPair pilots, const NoiseModel& noise, double cap = kDefaultSinrCap);

/// Joint search across subcarriers sharing one angle. Ties keep the lowest index.
EstimationResult algorithm2(std::span<const ReceivedBlock> blocks, const PermutedDftFamily& family,
                            const Codebook& codebook, std::span<const PilotPair> pilots, const NoiseModel& noise,
                            const ArrayGeometry& geometry, double cap = kDefaultSinrCap);

/// Complex multiplications of the receiver search: M (2 N^2 + Q N).
std::uint64_t complexity_psi(std::uint64_t n_antennas, std::uint64_t n_subcarriers, std::uint64_t q_levels);

}  // namespace circle
