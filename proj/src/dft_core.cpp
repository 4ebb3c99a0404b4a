// SPDX-License-Identifier: Apache-2.0
#include "circle/dft_core.hpp"

#include <cmath>
#include <string>

#include "circle/error.hpp"

namespace circle {
namespace {

void require_size(std::size_t n, const char* what) {
  if (n == 0) throw Error(ErrorCode::kInvalidSize, std::string(what) + " requires n >= 1");
}

void require_index(std::size_t i, std::size_t n, const char* what) {
  if (i >= n) {
    throw Error(ErrorCode::kIndexOutOfRange,
                std::string(what) + ": index " + std::to_string(i) + " not below " + std::to_string(n));
  }
}

}  // namespace

std::size_t CirculantIndex::entry(std::size_t row, std::size_t col) const {
  require_index(row, n_, "CirculantIndex row");
  require_index(col, n_, "CirculantIndex column");
  return entries_[row * n_ + col];
}

CirculantIndex build_circulant_index(std::size_t n) {
  require_size(n, "build_circulant_index");
  CirculantIndex c;
  c.n_ = n;
  c.entries_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      c.entries_[i * n + k] = (i + n - k) % n + 1;
    }
  }
  return c;
}

DftMatrix build_dft(std::size_t n) {
  require_size(n, "build_dft");
  DftMatrix d{n, CMatrix(n, n)};
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce the exponent first so large n keeps full phase accuracy.
      const std::size_t e = (p * j) % n;
      const double phase = -2.0 * kPi * static_cast<double>(e) / static_cast<double>(n);
      d.u(p, j) = std::polar(scale, phase);
    }
  }
  return d;
}

const CMatrix& PermutedDftFamily::member(std::size_t k) const {
  require_index(k, n_, "PermutedDftFamily::member");
  return members_[k];
}

const CVector& PermutedDftFamily::cross_diagonal(std::size_t k, std::size_t k2) const {
  require_index(k, n_, "cross_diagonal");
  require_index(k2, n_, "cross_diagonal");
  return shift_diagonals_[(k2 + n_ - k) % n_];
}

PermutedDftFamily build_family(std::size_t n) {
  require_size(n, "build_family");
  PermutedDftFamily f;
  f.n_ = n;
  f.index_ = build_circulant_index(n);
  f.dft_ = build_dft(n);
  f.members_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    CMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      m.col(j) = f.dft_.u.col(f.index_.column(j, k));
    }
    f.members_.push_back(std::move(m));
  }
  f.shift_diagonals_.reserve(n);
  for (std::size_t d = 0; d < n; ++d) {
    const CMatrix& a = f.members_[0];
    const CMatrix& b = f.members_[d];
    f.shift_diagonals_.push_back(a.cwiseProduct(b.conjugate()).rowwise().sum());
  }
  return f;
}

const CMatrix& PrecoderSet::slot(std::size_t n) const {
  require_index(n, n_, "PrecoderSet::slot");
  return slots_[n];
}

PrecoderSet build_precoders(const PermutedDftFamily& family) {
  const std::size_t n = family.size();
  PrecoderSet p;
  p.n_ = n;
  p.slots_.assign(n, CMatrix(n, n));
  for (std::size_t slot = 0; slot < n; ++slot) {
    for (std::size_t k = 0; k < n; ++k) {
      p.slots_[slot].col(k) = family.member(k).col(slot);
    }
  }
  return p;
}

CMatrix member_product(const PermutedDftFamily& family, std::size_t k, std::size_t k2) {
  return family.member(k) * family.member(k2).adjoint();
}

}  // namespace circle
