// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "circle/channel.hpp"
#include "circle/dft_core.hpp"
#include "circle/rng.hpp"
#include "circle/types.hpp"

namespace circle {

enum class SymbolSource { kQpsk, kGaussian };

/// Known pilot values carried in the last two symbol slots (n-2 and n-1).
struct PilotPair {
  Complex first{1.0, 0.0};
  Complex second{1.0, 0.0};
};

/// One downlink frame: per subcarrier, n - 2 information symbols followed by
/// two pilots.
struct Frame {
  std::size_t n = 0;
  std::vector<CVector> symbols;  // per subcarrier, length n

  std::size_t info_count() const { return n - 2; }
  std::size_t n_subcarriers() const { return symbols.size(); }
  PilotPair pilots(std::size_t m) const;
};

/// Unit-power QPSK point (+-1 +-i)/sqrt(2) selected by the two low bits.
Complex qpsk_symbol(unsigned bits);
/// Nearest QPSK point index for hard detection.
unsigned qpsk_decide(Complex z);

Frame make_frame(std::size_t n, SymbolSource source, Rng& rng, std::size_t n_subcarriers = 1,
                 PilotPair pilots = {});

/// x_slot = P_slot s / sqrt(n) for every slot.
std::vector<CVector> transmit(const PrecoderSet& precoders, const CVector& symbols);

struct ReceivedBlock {
  std::size_t device = 0;
  std::size_t subcarrier = 0;
  CVector y;      // one sample per slot
  CVector noise;  // the noise that was added, kept for oracle checks
};

/// y(slot) = sqrt(p_t) h^H x_slot + z(slot), z ~ CN(0, sigma^2 I).
ReceivedBlock receive(const CVector& h, std::span<const CVector> xs, const NoiseModel& noise, Rng& rng,
                      std::size_t device = 0, std::size_t subcarrier = 0);
ReceivedBlock receive(const ChannelRealization& channel, std::size_t subcarrier,
                      std::span<const CVector> xs, const NoiseModel& noise, Rng& rng);

}  // namespace circle
