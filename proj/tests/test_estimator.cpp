// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "circle/estimator.hpp"
#include "support.hpp"

using namespace circle;

namespace {

struct Scene {
  ArrayGeometry geometry;
  PermutedDftFamily family;
  PrecoderSet precoders;
};

Scene make_scene(ArrayGeometry g) {
  auto fam = build_family(g.n_antennas);
  auto pre = build_precoders(fam);
  return {g, std::move(fam), std::move(pre)};
}

// Blocks of one device on every subcarrier for one random frame.
std::vector<ReceivedBlock> observe(const Scene& sc, const ChannelRealization& c, const NoiseModel& noise, Rng& rng,
                                   std::vector<PilotPair>& pilots) {
  const Frame f = make_frame(sc.geometry.n_antennas, SymbolSource::kGaussian, rng, sc.geometry.n_subcarriers);
  std::vector<ReceivedBlock> blocks;
  pilots.clear();
  for (std::size_t m = 0; m < sc.geometry.n_subcarriers; ++m) {
    const auto xs = transmit(sc.precoders, f.symbols[m]);
    blocks.push_back(receive(c, m, xs, noise, rng));
    pilots.push_back(f.pilots(m));
  }
  return blocks;
}

ChannelRealization los_channel(const ArrayGeometry& g, std::size_t device, double theta, std::vector<Complex> gains) {
  ChannelRealization c;
  c.device = device;
  c.los_aod = theta;
  c.los_gain = std::move(gains);
  materialize(g, c);
  return c;
}

}  // namespace

TEST_CASE("codebook grid") {
  const auto g = ArrayGeometry::narrowband(4);
  const Codebook full = build_codebook(g, 8);
  CHECK(full.angles.front() == doctest::Approx(-kPi));
  CHECK(full.angles[4] == doctest::Approx(0.0));
  CHECK(full.angles.back() == doctest::Approx(-kPi + 2.0 * kPi * 7.0 / 8.0));
  const Codebook restricted = build_codebook(g, 4, AngularDomain::range(0.5));
  CHECK(restricted.angles[0] == 0.0);
  CHECK(restricted.angles[3] == doctest::Approx(0.375 * kPi));
  for (std::size_t q = 0; q < 8; ++q) {
    CHECK((full.vector(0, q) - array_response(g, full.angles[q])).norm() == 0.0);
  }
  CHECK_ERROR_CODE(build_codebook(g, 0), ErrorCode::kInvalidSize);
}

TEST_CASE("gain estimate: exact on the true angle and linear in the channel") {
  const Scene sc = make_scene(ArrayGeometry::narrowband(12));
  const Codebook cb = build_codebook(sc.geometry, 64);
  const NoiseModel noise{0.0, 1.0};
  Rng rng(1);
  const std::size_t q_true = 21;
  const Complex alpha(0.4, -1.2);
  std::vector<PilotPair> pilots;
  const auto c = los_channel(sc.geometry, 0, cb.angles[q_true], {alpha});
  const auto block = observe(sc, c, noise, rng, pilots).front();
  const Complex est = estimate_gain(q_true, block, sc.family, cb, pilots[0].first, noise);
  CHECK(std::abs(est - alpha) < 1e-9 * std::abs(alpha));

  ReceivedBlock scaled = block;
  scaled.y *= Complex(2.0, 1.0);
  // y scales with conj(h), and the estimate undoes the conjugation.
  const Complex est_scaled = estimate_gain(q_true, scaled, sc.family, cb, pilots[0].first, noise);
  CHECK(std::abs(est_scaled - Complex(2.0, -1.0) * est) < 1e-9 * std::abs(est_scaled));

  CHECK_ERROR_CODE(estimate_gain(q_true, block, sc.family, cb, Complex{}, noise), ErrorCode::kInvalidPilot);
  CHECK_ERROR_CODE(estimate_gain(64, block, sc.family, cb, Complex(1.0, 0.0), noise), ErrorCode::kIndexOutOfRange);

  // A far grid point scores strictly lower.
  const double right = score_candidate(q_true, block, sc.family, cb, est, pilots[0].second, noise);
  CHECK(right == doctest::Approx(std::log2(1.0 + kDefaultSinrCap)));
  const std::size_t far = q_true + 10;
  const Complex est_far = estimate_gain(far, block, sc.family, cb, pilots[0].first, noise);
  CHECK(std::abs(est_far - alpha) > 1e-3);
  CHECK(score_candidate(far, block, sc.family, cb, est_far, pilots[0].second, noise) < right);
}

TEST_CASE("scores: two-point codebook, finite under noise") {
  const Scene sc = make_scene(ArrayGeometry::narrowband(8));
  const Codebook cb = build_codebook(sc.geometry, 2, AngularDomain{0.0, 1.0});  // angles 0 and 0.5
  Rng rng(2);
  std::vector<PilotPair> pilots;
  const auto c = los_channel(sc.geometry, 0, 0.5, {Complex(1.0, 0.5)});
  const NoiseModel quiet{0.0, 1.0};
  const auto block = observe(sc, c, quiet, rng, pilots).front();
  auto score_of = [&](std::size_t q) {
    const Complex a = estimate_gain(q, block, sc.family, cb, pilots[0].first, quiet);
    return score_candidate(q, block, sc.family, cb, a, pilots[0].second, quiet);
  };
  CHECK(score_of(1) > score_of(0));

  const NoiseModel noisy{0.1, 1.0};
  const Codebook wide = build_codebook(sc.geometry, 32);
  const auto noisy_block = observe(sc, c, noisy, rng, pilots).front();
  for (std::size_t q = 0; q < 32; ++q) {
    const Complex a = estimate_gain(q, noisy_block, sc.family, wide, pilots[0].first, noisy);
    const double s = score_candidate(q, noisy_block, sc.family, wide, a, pilots[0].second, noisy);
    CHECK(std::isfinite(s));
    CHECK(s > 0.0);
  }
}

TEST_CASE("scorer agrees with the estimated sinr definition") {
  const Scene sc = make_scene(ArrayGeometry::narrowband(10));
  const Codebook cb = build_codebook(sc.geometry, 40);
  const NoiseModel noise{0.05, 1.0};
  Rng rng(3);
  std::vector<PilotPair> pilots;
  const auto c = los_channel(sc.geometry, 0, 0.37, {Complex(0.8, 0.1)});
  const auto block = observe(sc, c, noise, rng, pilots).front();
  for (std::size_t q = 0; q < 40; q += 3) {
    const Complex a = estimate_gain(q, block, sc.family, cb, pilots[0].first, noise);
    // Direct route: combine with the pilot-1 combiner, then the SINR of pilot 2.
    const Complex d1 = combine(cb.vector(0, q), sc.family, 8, block);
    const Complex a_direct = std::conj(d1 / (std::sqrt(noise.tx_power * 10.0) * pilots[0].first));
    CHECK(std::abs(a - a_direct) < 1e-12 * std::max(1.0, std::abs(a)));
    const auto rep = estimated_sinr(a * cb.vector(0, q), sc.family, block.y, pilots[0].second, noise);
    CHECK(score_candidate(q, block, sc.family, cb, a, pilots[0].second, noise) ==
          doctest::Approx(rep.se_bits).epsilon(1e-10));
  }
}

TEST_CASE("algorithm 1: on-grid recovery, degenerate sweep, ties") {
  const Scene sc = make_scene(ArrayGeometry::narrowband(16));
  // sin is one-to-one on [-pi/2, pi/2), so the grid index is unambiguous.
  const Codebook cb = build_codebook(sc.geometry, 64, AngularDomain{-kPi / 2.0, kPi});
  const NoiseModel noise{0.0, 1.0};
  Rng rng(4);
  std::vector<PilotPair> pilots;
  const auto c = los_channel(sc.geometry, 2, cb.angles[16], {Complex(-0.3, 0.9)});
  const auto block = observe(sc, c, noise, rng, pilots).front();
  const auto est = algorithm1(block, sc.family, cb, pilots[0], noise);
  CHECK(est.q_star == 16);
  CHECK(est.device == 2);
  CHECK((est.h_hat[0] - c.h[0]).norm() < 1e-9 * c.h[0].norm());
  CHECK(est.multiply_count == complexity_psi(16, 1, 64));

  const Codebook single = build_codebook(sc.geometry, 1);
  CHECK(algorithm1(block, sc.family, single, pilots[0], noise).q_star == 0);

  // Full circle: a(theta) = a(pi - theta). Both twins hit the cap, so the
  // lower index wins.
  const Codebook full = build_codebook(sc.geometry, 8);
  const auto twin = los_channel(sc.geometry, 0, full.angles[7], {Complex(1.0, 0.0)});  // 3pi/4, twin pi/4
  const auto tb = observe(sc, twin, noise, rng, pilots).front();
  const auto tie = algorithm1(tb, sc.family, full, pilots[0], noise, 1e10);
  CHECK(tie.q_star == 5);
}

TEST_CASE("algorithm 1: the selection is the argmax of the candidate scores") {
  const Scene sc = make_scene(ArrayGeometry::narrowband(16));
  const Codebook cb = build_codebook(sc.geometry, 128);
  const NoiseModel noise{0.05, 1.0};
  Rng rng(5);
  std::vector<PilotPair> pilots;
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = los_channel(sc.geometry, 0, rng.uniform(-kPi, kPi), {rng.complex_normal(1.0)});
    const auto block = observe(sc, c, noise, rng, pilots).front();
    const auto est = algorithm1(block, sc.family, cb, pilots[0], noise);
    double best = -1.0;
    std::size_t best_q = 0;
    for (std::size_t q = 0; q < cb.q_levels; ++q) {
      const Complex a = estimate_gain(q, block, sc.family, cb, pilots[0].first, noise);
      const double s = score_candidate(q, block, sc.family, cb, a, pilots[0].second, noise);
      if (s > best) {
        best = s;
        best_q = q;
      }
    }
    CHECK(est.q_star == best_q);
    CHECK(est.score == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("exact sinr over a fine grid peaks where sin matches") {
  const Scene sc = make_scene(ArrayGeometry::narrowband(12));
  const Codebook cb = build_codebook(sc.geometry, 720);
  const NoiseModel noise{0.01, 1.0};
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t q_true = rng.next_u64() % cb.q_levels;
    const Complex alpha = rng.complex_normal(1.0);
    const CVector h = alpha * cb.vector(0, q_true);
    const std::size_t k = rng.next_u64() % 10;
    const double peak = achieved_sinr(h, h, sc.family, k, noise).sinr;
    for (std::size_t q = 0; q < cb.q_levels; ++q) {
      const double v = achieved_sinr(h, alpha * cb.vector(0, q), sc.family, k, noise).sinr;
      const bool same_sin = std::abs(std::sin(cb.angles[q]) - std::sin(cb.angles[q_true])) < 1e-9;
      if (same_sin) {
        CHECK(v == doctest::Approx(peak).epsilon(1e-9));
      } else {
        CHECK(v < peak);
      }
    }
  }
}

TEST_CASE("algorithm 2: reduces to algorithm 1 and recovers wideband gains") {
  const Scene nb = make_scene(ArrayGeometry::narrowband(12));
  const Codebook cb = build_codebook(nb.geometry, 128);
  const NoiseModel noise{0.1, 1.0};
  Rng rng(6);
  std::vector<PilotPair> pilots;
  for (int trial = 0; trial < 10; ++trial) {
    const auto c = los_channel(nb.geometry, 0, rng.uniform(0.0, 2.0 * kPi), {rng.complex_normal(1.0)});
    const auto blocks = observe(nb, c, noise, rng, pilots);
    const auto a1 = algorithm1(blocks[0], nb.family, cb, pilots[0], noise);
    const auto a2 = algorithm2(blocks, nb.family, cb, pilots, noise, nb.geometry);
    CHECK(a1.q_star == a2.q_star);
    CHECK(a1.alpha_hat[0] == a2.alpha_hat[0]);
  }

  ArrayGeometry wide;
  wide.n_antennas = 10;
  wide.bandwidth_hz = 10e9;
  wide.n_subcarriers = 6;
  wide.cp_len = 2;
  const Scene sc = make_scene(wide);
  const Codebook wcb = build_codebook(wide, 96, AngularDomain{-kPi / 2.0, kPi});
  std::vector<Complex> gains;
  for (std::size_t m = 0; m < 6; ++m) gains.push_back(rng.complex_normal(1.0));
  const auto c = los_channel(wide, 1, wcb.angles[70], gains);
  const auto blocks = observe(sc, c, {0.0, 1.0}, rng, pilots);
  const auto est = algorithm2(blocks, sc.family, wcb, pilots, {0.0, 1.0}, wide);
  CHECK(est.q_star == 70);
  REQUIRE(est.alpha_hat.size() == 6);
  for (std::size_t m = 0; m < 6; ++m) {
    CHECK(std::abs(est.alpha_hat[m] - gains[m]) < 1e-9 * std::abs(gains[m]));
    CHECK((est.h_hat[m] - c.h[m]).norm() < 1e-9 * c.h[m].norm());
  }
  CHECK(est.score == doctest::Approx(6.0 / 8.0 * std::log2(1.0 + kDefaultSinrCap)));

  std::vector<ReceivedBlock> mixed = blocks;
  mixed[1].device = 0;
  CHECK_ERROR_CODE(algorithm2(mixed, sc.family, wcb, pilots, {0.0, 1.0}, wide), ErrorCode::kDimensionMismatch);
  CHECK_ERROR_CODE(algorithm2(std::span<const ReceivedBlock>{}, sc.family, wcb, pilots, {0.0, 1.0}, wide),
                   ErrorCode::kInvalidSize);
}

TEST_CASE("nested grids never lose achieved rate on-grid") {
  const Scene sc = make_scene(ArrayGeometry::narrowband(12));
  const NoiseModel noise{0.0, 1.0};
  const NoiseModel eval{0.01, 1.0};
  Rng rng(7);
  std::vector<PilotPair> pilots;
  const AngularDomain dom{-kPi / 2.0, kPi};
  const Codebook coarse = build_codebook(sc.geometry, 32, dom);
  const Codebook fine = build_codebook(sc.geometry, 64, dom);
  for (int trial = 0; trial < 10; ++trial) {
    const double theta = coarse.angles[rng.next_u64() % 32];
    const auto c = los_channel(sc.geometry, 0, theta, {rng.complex_normal(1.0)});
    const auto block = observe(sc, c, noise, rng, pilots).front();
    const auto ec = algorithm1(block, sc.family, coarse, pilots[0], noise);
    const auto ef = algorithm1(block, sc.family, fine, pilots[0], noise);
    const double rc = achieved_sinr(c.h[0], ec.h_hat[0], sc.family, 0, eval).se_bits;
    const double rf = achieved_sinr(c.h[0], ef.h_hat[0], sc.family, 0, eval).se_bits;
    CHECK(rf >= rc - 1e-9);
  }
}

TEST_CASE("complexity count") {
  CHECK(complexity_psi(1, 1, 1) == 3);
  CHECK(complexity_psi(32, 10, 512) == 184320);
  CHECK(complexity_psi(32, 20, 512) == 2 * complexity_psi(32, 10, 512));
  CHECK_ERROR_CODE(complexity_psi(0, 1, 1), ErrorCode::kInvalidSize);
  CHECK_ERROR_CODE(complexity_psi(std::uint64_t{1} << 40, 1, 1), ErrorCode::kOverflow);
}
