#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace g2kit {

/// Failure categories raised by the library. Each maps to one exit code class
/// in the CLI (configuration vs numerical failure).
enum class Errc {
  kInvalidArgument,
  kParseError,
  kVacuumState,
  kNoConvergence,
  kBelowMinimalSqueezing,
  kUnstable,
  kBadEta,
  kBranchJump,
  kSingular,
  kUnstableLinearization,
  kQuadratureNotConverged,
  kDimensionOverflow,
  kNoNullVector,
  kCutoffNotConverged,
  kUnphysicalMoments,
};

constexpr std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kParseError: return "ParseError";
    case Errc::kVacuumState: return "VacuumState";
    case Errc::kNoConvergence: return "NoConvergence";
    case Errc::kBelowMinimalSqueezing: return "BelowMinimalSqueezing";
    case Errc::kUnstable: return "Unstable";
    case Errc::kBadEta: return "BadEta";
    case Errc::kBranchJump: return "BranchJump";
    case Errc::kSingular: return "Singular";
    case Errc::kUnstableLinearization: return "UnstableLinearization";
    case Errc::kQuadratureNotConverged: return "QuadratureNotConverged";
    case Errc::kDimensionOverflow: return "DimensionOverflow";
    case Errc::kNoNullVector: return "NoNullVector";
    case Errc::kCutoffNotConverged: return "CutoffNotConverged";
    case Errc::kUnphysicalMoments: return "UnphysicalMoments";
  }
  return "Unknown";
}

/// True for errors caused by user input rather than by the numerics.
constexpr bool is_config_error(Errc code) noexcept {
  return code == Errc::kInvalidArgument || code == Errc::kParseError ||
         code == Errc::kBadEta || code == Errc::kDimensionOverflow;
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace g2kit
