// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace circle {

enum class ErrorCode {
  kInvalidSize,
  kIndexOutOfRange,
  kDegenerateChannel,
  kUndefinedSnr,
  kFrameTooSmall,
  kDimensionMismatch,
  kInvalidPilot,
  kSingularChannel,
  kOverflow,
  kInvalidConfig,
  kUnknownPreset,
  kIo,
  kUnavailable,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace circle
