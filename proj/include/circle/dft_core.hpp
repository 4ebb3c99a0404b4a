// SPDX-License-Identifier: Apache-2.0
//
// Deterministic precoder construction from circulant column permutations of
// the unitary DFT matrix.
//
// All indices in this API are zero-based. The circulant index matrix keeps the
// one-based values of its textbook definition (entries in [1, n]); column()
// converts them to a zero-based DFT column.
#pragma once

#include <cstddef>
#include <vector>

#include "circle/types.hpp"

namespace circle {

class CirculantIndex {
 public:
  std::size_t size() const { return n_; }
  /// Value in [1, n] at zero-based (row, col): ((row - col) mod n) + 1.
  std::size_t entry(std::size_t row, std::size_t col) const;
  /// Zero-based DFT column selected by (row, col).
  std::size_t column(std::size_t row, std::size_t col) const { return entry(row, col) - 1; }

 private:
  friend CirculantIndex build_circulant_index(std::size_t n);
  std::size_t n_ = 0;
  std::vector<std::size_t> entries_;  // row-major
};

CirculantIndex build_circulant_index(std::size_t n);

/// Unitary DFT matrix: u(p, j) = exp(-i 2 pi p j / n) / sqrt(n).
struct DftMatrix {
  std::size_t n = 0;
  CMatrix u;
};

DftMatrix build_dft(std::size_t n);

/// The n column permutations of the DFT matrix. Member k takes DFT columns in
/// the order of column k of the circulant index matrix. Doubles as the set of
/// per-device combiners.
class PermutedDftFamily {
 public:
  std::size_t size() const { return n_; }
  const CMatrix& member(std::size_t k) const;
  const CirculantIndex& index() const { return index_; }
  const DftMatrix& dft() const { return dft_; }

  /// Diagonal of member(k) * member(k2)^H. The product is diagonal for any
  /// pair and its diagonal only depends on (k2 - k) mod n, so these are cached
  /// once per shift.
  const CVector& cross_diagonal(std::size_t k, std::size_t k2) const;

 private:
  friend PermutedDftFamily build_family(std::size_t n);
  std::size_t n_ = 0;
  CirculantIndex index_;
  DftMatrix dft_;
  std::vector<CMatrix> members_;
  std::vector<CVector> shift_diagonals_;
};

PermutedDftFamily build_family(std::size_t n);

/// Per-slot precoders: slot n, column k equals column n of family member k.
class PrecoderSet {
 public:
  std::size_t size() const { return n_; }
  const CMatrix& slot(std::size_t n) const;

 private:
  friend PrecoderSet build_precoders(const PermutedDftFamily& family);
  std::size_t n_ = 0;
  std::vector<CMatrix> slots_;
};

PrecoderSet build_precoders(const PermutedDftFamily& family);

/// member(k) * member(k2)^H, computed densely. Identity for k == k2, a
/// zero-trace diagonal matrix otherwise.
CMatrix member_product(const PermutedDftFamily& family, std::size_t k, std::size_t k2);

}  // namespace circle
