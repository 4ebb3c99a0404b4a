// SPDX-License-Identifier: Apache-2.0
#include "circle/error.hpp"

namespace circle {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSize: return "invalid-size";
    case ErrorCode::kIndexOutOfRange: return "index-out-of-range";
    case ErrorCode::kDegenerateChannel: return "degenerate-channel";
    case ErrorCode::kUndefinedSnr: return "undefined-snr";
    case ErrorCode::kFrameTooSmall: return "frame-too-small";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kInvalidPilot: return "invalid-pilot";
    case ErrorCode::kSingularChannel: return "singular-channel";
    case ErrorCode::kOverflow: return "overflow";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kUnknownPreset: return "unknown-preset";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kUnavailable: return "unavailable";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace circle
