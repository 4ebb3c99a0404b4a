// SPDX-License-Identifier: Apache-2.0
#include "circle/transceiver.hpp"

#include <cmath>
#include <string>

#include "circle/error.hpp"

namespace circle {

PilotPair Frame::pilots(std::size_t m) const {
  const CVector& s = symbols.at(m);
  return {s(n - 2), s(n - 1)};
}

Complex qpsk_symbol(unsigned bits) {
  const double a = 1.0 / std::sqrt(2.0);
  return {(bits & 1U) ? -a : a, (bits & 2U) ? -a : a};
}

unsigned qpsk_decide(Complex z) {
  return (z.real() < 0.0 ? 1U : 0U) | (z.imag() < 0.0 ? 2U : 0U);
}

Frame make_frame(std::size_t n, SymbolSource source, Rng& rng, std::size_t n_subcarriers,
                 PilotPair pilots) {
  if (n < 3) {
    throw Error(ErrorCode::kFrameTooSmall, "frame of size " + std::to_string(n) +
                                               " cannot hold two pilots and a symbol");
  }
  if (n_subcarriers == 0) throw Error(ErrorCode::kInvalidSize, "frame needs a subcarrier");
  Frame f;
  f.n = n;
  f.symbols.assign(n_subcarriers, CVector(n));
  for (CVector& s : f.symbols) {
    for (std::size_t i = 0; i + 2 < n; ++i) {
      s(i) = source == SymbolSource::kQpsk ? qpsk_symbol(static_cast<unsigned>(rng.next_u64() & 3U))
                                           : rng.complex_normal(1.0);
    }
    s(n - 2) = pilots.first;
    s(n - 1) = pilots.second;
  }
  return f;
}

std::vector<CVector> transmit(const PrecoderSet& precoders, const CVector& symbols) {
  const std::size_t n = precoders.size();
  if (static_cast<std::size_t>(symbols.size()) != n) {
    throw Error(ErrorCode::kDimensionMismatch, "symbol vector length " + std::to_string(symbols.size()) +
                                                   " vs precoder size " + std::to_string(n));
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<CVector> xs;
  xs.reserve(n);
  for (std::size_t slot = 0; slot < n; ++slot) {
    xs.push_back(scale * (precoders.slot(slot) * symbols));
  }
  return xs;
}

ReceivedBlock receive(const CVector& h, std::span<const CVector> xs, const NoiseModel& noise, Rng& rng,
                      std::size_t device, std::size_t subcarrier) {
  const std::size_t n = xs.size();
  ReceivedBlock b;
  b.device = device;
  b.subcarrier = subcarrier;
  b.y.resize(n);
  b.noise.resize(n);
  const double amp = std::sqrt(noise.tx_power);
  for (std::size_t slot = 0; slot < n; ++slot) {
    if (xs[slot].size() != h.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "transmit vector and channel differ in length");
    }
    b.noise(slot) = rng.complex_normal(noise.variance);
    b.y(slot) = amp * h.dot(xs[slot]) + b.noise(slot);  // dot() conjugates h
  }
  return b;
}

ReceivedBlock receive(const ChannelRealization& channel, std::size_t subcarrier,
                      std::span<const CVector> xs, const NoiseModel& noise, Rng& rng) {
  if (subcarrier >= channel.h.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "channel has no subcarrier " + std::to_string(subcarrier));
  }
  return receive(channel.h[subcarrier], xs, noise, rng, channel.device, subcarrier);
}

}  // namespace circle
