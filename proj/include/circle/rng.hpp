// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "circle/types.hpp"

namespace circle {

/// Mixes an ordered list of integers into one 64-bit seed (splitmix64 chain).
/// Used to give every (trial, device, subcarrier, purpose) its own stream.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

/// Seeded generator. Gaussian draws use Box-Muller over mt19937_64 so the
/// sample sequence does not depend on the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Circular complex Gaussian CN(0, variance).
  Complex complex_normal(double variance);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace circle
