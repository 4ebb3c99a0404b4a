// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <doctest.h>

#include "circle/error.hpp"
#include "circle/rng.hpp"
#include "circle/types.hpp"

namespace circle::test {

template <typename F>
ErrorCode thrown_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected circle::Error");
  return ErrorCode::kIo;
}

#define CHECK_ERROR_CODE(expr, expected) CHECK(::circle::test::thrown_code([&] { (void)(expr); }) == (expected))

inline CVector random_vector(Rng& rng, std::size_t n, double variance = 1.0) {
  CVector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal(variance);
  return v;
}

// Straight from the definition, with no shared code path: the textbook DFT entry.
inline Complex dft_entry(std::size_t n, std::size_t row, std::size_t col) {
  const double angle = -2.0 * kPi * static_cast<double>(row) * static_cast<double>(col) / static_cast<double>(n);
  return std::polar(1.0 / std::sqrt(static_cast<double>(n)), angle);
}

}  // namespace circle::test
