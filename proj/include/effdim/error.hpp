#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace effdim {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kNotSymmetric,
  kNotPositiveDefinite,
  kNotPositiveSemidefinite,
  kSampleSizeTooSmall,
  kRankDeficientCoarsening,
  kSingularReparameterization,
  kEmptySpectrum,
  kDivergentSpectrum,
  kInsufficientSamples,
  kParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. The code is what callers branch on;
/// the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace effdim
