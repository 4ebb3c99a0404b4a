// SPDX-License-Identifier: Apache-2.0
#include "circle/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "circle/error.hpp"
#include "circle/estimator.hpp"
#include "circle/rng.hpp"

namespace circle {
namespace {

constexpr std::uint64_t kChannelTag = 0x63'68'61'6e;
constexpr std::uint64_t kFrameTag = 0x66'72'61'6d;

// Everything that depends only on the sweep point.
struct PointContext {
  ResolvedPoint point;
  std::unique_ptr<PermutedDftFamily> family;
  std::unique_ptr<PrecoderSet> precoders;
  std::unique_ptr<Codebook> codebook;
};

bool has(const std::vector<Method>& methods, Method m) {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// A zero gain estimate leaves nothing to invert; the device then gets no rate.
double achieved_se(const CVector& h, const CVector& h_hat, const PermutedDftFamily& family, std::size_t k,
                   const NoiseModel& noise, double cap) {
  try {
    return achieved_sinr(h, h_hat, family, k, noise, cap).se_bits;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegenerateChannel) return 0.0;
    throw;
  }
}

double genie_se(const CVector& h, const NoiseModel& noise, double cap) {
  try {
    return spectral_efficiency(exact_sinr(h, noise).sinr, cap);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kDegenerateChannel) return 0.0;
    throw;
  }
}

void finish(TrialResult& r) {
  r.sum_se = 0.0;
  for (double v : r.per_device_se) r.sum_se += v;
}

std::vector<TrialResult> run_trial(const ExperimentConfig& config, const PointContext& ctx, std::size_t point_index,
                                   std::size_t trial, bool timing) {
  const ResolvedPoint& pt = ctx.point;
  const ArrayGeometry& geom = pt.geometry;
  const std::size_t n = pt.n_antennas;
  const std::size_t k_count = pt.n_devices;
  const std::size_t m_count = geom.n_subcarriers;
  const double scale = geom.rate_scale();
  const double cap = config.sinr_cap;

  const std::uint64_t trial_seed = derive_seed({config.seed, trial});
  std::vector<ChannelRealization> channels;
  channels.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    Rng rng(derive_seed({trial_seed, kChannelTag, k}));
    channels.push_back(sample_channel(geom, k, rng, pt.profile));
  }

  auto base = [&](Method m) {
    TrialResult r;
    r.point_index = point_index;
    r.trial_index = trial;
    r.sweep_value = pt.sweep_value;
    r.method = m;
    r.per_device_se.assign(k_count, 0.0);
    return r;
  };

  std::map<Method, TrialResult> out;

  const bool want_circle = has(config.methods, Method::kCircle);
  const bool want_rcircle = has(config.methods, Method::kRCircle);
  if (want_circle || want_rcircle) {
    if (config.csir == CsirMode::kGenie) {
      // Both variants coincide once the receiver knows its channel.
      const auto t0 = Clock::now();
      TrialResult r = base(Method::kCircle);
      for (std::size_t k = 0; k < k_count; ++k) {
        double se = 0.0;
        for (std::size_t m = 0; m < m_count; ++m) se += genie_se(channels[k].h[m], pt.noise, cap);
        r.per_device_se[k] = scale * se;
      }
      finish(r);
      r.wall_time_s = timing ? seconds_since(t0) : 0.0;
      if (want_circle) out[Method::kCircle] = r;
      if (want_rcircle) {
        r.method = Method::kRCircle;
        out[Method::kRCircle] = r;
      }
    } else {
      const auto t0 = Clock::now();
      Rng frame_rng(derive_seed({trial_seed, kFrameTag}));
      const Frame frame = make_frame(n, config.symbol_source, frame_rng, m_count);
      std::vector<std::vector<CVector>> xs(m_count);
      std::vector<PilotPair> pilots(m_count);
      for (std::size_t m = 0; m < m_count; ++m) {
        xs[m] = transmit(*ctx.precoders, frame.symbols[m]);
        pilots[m] = frame.pilots(m);
      }
      const double shared_time = timing ? seconds_since(t0) : 0.0;
      double circle_time = shared_time;
      double rcircle_time = shared_time;

      TrialResult rc = base(Method::kCircle);
      TrialResult rr = base(Method::kRCircle);
      const std::uint64_t psi = complexity_psi(n, m_count, pt.q_levels);
      rc.psi = psi;
      rr.psi = psi;
      std::vector<ReceivedBlock> blocks(m_count);
      for (std::size_t k = 0; k < k_count; ++k) {
        const auto tk = Clock::now();
        for (std::size_t m = 0; m < m_count; ++m) {
          Rng noise_rng(derive_seed({config.seed, trial, k, m}));
          blocks[m] = receive(channels[k], m, xs[m], pt.noise, noise_rng);
        }
        const ScoreGrid grid = score_grid(blocks, *ctx.family, *ctx.codebook, pilots, pt.noise, cap);
        const double grid_time = timing ? seconds_since(tk) : 0.0;

        if (want_circle) {
          const auto t1 = Clock::now();
          double se = 0.0;
          for (std::size_t row = 0; row < grid.rows(); ++row) {
            const EstimationResult est = select_row(grid, row, *ctx.codebook);
            const std::size_t m = grid.subcarriers[row];
            se += achieved_se(channels[k].h[m], est.h_hat.front(), *ctx.family, k, pt.noise, cap);
            rc.q_star.push_back(est.q_star);
          }
          rc.per_device_se[k] = scale * se;
          circle_time += grid_time + (timing ? seconds_since(t1) : 0.0);
        }
        if (want_rcircle) {
          const auto t1 = Clock::now();
          const EstimationResult est = select_joint(grid, *ctx.codebook, geom);
          double se = 0.0;
          for (std::size_t row = 0; row < grid.rows(); ++row) {
            const std::size_t m = grid.subcarriers[row];
            se += achieved_se(channels[k].h[m], est.h_hat[row], *ctx.family, k, pt.noise, cap);
          }
          rr.q_star.push_back(est.q_star);
          rr.per_device_se[k] = scale * se;
          rcircle_time += grid_time + (timing ? seconds_since(t1) : 0.0);
        }
      }
      finish(rc);
      finish(rr);
      rc.wall_time_s = circle_time;
      rr.wall_time_s = rcircle_time;
      if (want_circle) out[Method::kCircle] = std::move(rc);
      if (want_rcircle) out[Method::kRCircle] = std::move(rr);
    }
  }

  if (has(config.methods, Method::kBound)) {
    const auto t0 = Clock::now();
    TrialResult r = base(Method::kBound);
    for (std::size_t k = 0; k < k_count; ++k) {
      double se = 0.0;
      for (std::size_t m = 0; m < m_count; ++m) se += max_se(channels[k].h[m], pt.noise, pt.bound_form);
      r.per_device_se[k] = scale * se;
    }
    finish(r);
    r.wall_time_s = timing ? seconds_since(t0) : 0.0;
    out[Method::kBound] = std::move(r);
  }

  for (Method m : {Method::kMrt, Method::kZf, Method::kWmmse}) {
    if (!has(config.methods, m)) continue;
    const auto t0 = Clock::now();
    CsitPrecoder precoder = m == Method::kMrt  ? mrt(channels)
                            : m == Method::kZf ? zf(channels)
                                               : wmmse(channels, pt.noise, config.csit_normalization, config.wmmse);
    TrialResult r = base(m);
    r.per_device_se = csit_device_se(precoder, channels, pt.noise, geom, config.csit_normalization);
    finish(r);
    r.wall_time_s = timing ? seconds_since(t0) : 0.0;
    out[m] = std::move(r);
  }

  std::vector<TrialResult> ordered;
  ordered.reserve(config.methods.size());
  for (Method m : config.methods) ordered.push_back(std::move(out.at(m)));
  return ordered;
}

}  // namespace

std::vector<TrialResult> run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);

  const std::vector<double> values = sweep_values(config);
  const bool needs_estimation =
      config.csir == CsirMode::kEstimated &&
      (has(config.methods, Method::kCircle) || has(config.methods, Method::kRCircle));

  std::vector<PointContext> points;
  points.reserve(values.size());
  for (double v : values) {
    PointContext ctx;
    ctx.point = resolve(config, v);
    if (needs_estimation) {
      // The codebook covers the same angular range the channels are drawn from.
      ctx.family = std::make_unique<PermutedDftFamily>(build_family(ctx.point.n_antennas));
      ctx.precoders = std::make_unique<PrecoderSet>(build_precoders(*ctx.family));
      ctx.codebook = std::make_unique<Codebook>(
          build_codebook(ctx.point.geometry, ctx.point.q_levels,
                         AngularDomain{ctx.point.profile.angle_start, ctx.point.profile.angle_span}));
    }
    points.push_back(std::move(ctx));
  }
  const std::size_t n_items = points.size() * config.n_trials;
  std::vector<std::vector<TrialResult>> slots(n_items);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t item = next.fetch_add(1);
      if (item >= n_items) return;
      try {
        const std::size_t p = item / config.n_trials;
        slots[item] = run_trial(config, points[p], p, item % config.n_trials, options.timing);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_items);
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(n_items, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<TrialResult> results;
  results.reserve(n_items * config.methods.size());
  for (auto& slot : slots) {
    for (auto& r : slot) results.push_back(std::move(r));
  }
  return results;
}

std::vector<MethodSummary> summarize(const std::vector<TrialResult>& results) {
  std::vector<MethodSummary> out;
  std::vector<std::vector<double>> samples;
  std::map<std::pair<std::size_t, Method>, std::size_t> slot;
  for (const TrialResult& r : results) {
    auto [it, inserted] = slot.try_emplace({r.point_index, r.method}, out.size());
    if (inserted) {
      out.push_back({r.sweep_value, r.method, 0, 0.0, 0.0});
      samples.emplace_back();
    }
    samples[it->second].push_back(r.sum_se);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& xs = samples[i];
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    out[i].count = xs.size();
    out[i].mean = mean;
    out[i].std_error = xs.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  return out;
}

std::string format_csv(const std::vector<TrialResult>& results, const std::string& sweep_variable) {
  std::string text = "trial,method," + sweep_variable + ",sum_se,psi,wall_time_s\n";
  char buf[256];
  for (const TrialResult& r : results) {
    std::snprintf(buf, sizeof buf, "%zu,%s,%.12g,%.12g,%llu,%.12g\n", r.trial_index,
                  std::string(to_string(r.method)).c_str(), r.sweep_value, r.sum_se,
                  static_cast<unsigned long long>(r.psi), r.wall_time_s);
    text += buf;
  }
  return text;
}

void write_csv(const std::vector<TrialResult>& results, const std::string& path, const std::string& sweep_variable) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  out << format_csv(results, sweep_variable);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

}  // namespace circle
