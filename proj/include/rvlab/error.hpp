#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rvlab {

enum class ErrorCode {
  IncompatibleVariant,
  NonpositiveScale,
  InvalidElement,
  DimensionMismatch,
  NonMonotoneOracle,
  InvalidInterval,
  TrivialPushforward,
  NonMorphism,
  TrivialResult,
  BadParameters,
  InsufficientData,
  InsufficientExceedances,
  ZeroModulus,
  InfiniteModulus,
  DegeneratePolytope,
  BadNormingRule,
  MomentDiagnosticFailed,  ///< reported as a warning, never thrown by the library
  Config,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::IncompatibleVariant: return "IncompatibleVariant";
    case ErrorCode::NonpositiveScale: return "NonpositiveScale";
    case ErrorCode::InvalidElement: return "InvalidElement";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonMonotoneOracle: return "NonMonotoneOracle";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::TrivialPushforward: return "TrivialPushforward";
    case ErrorCode::NonMorphism: return "NonMorphism";
    case ErrorCode::TrivialResult: return "TrivialResult";
    case ErrorCode::BadParameters: return "BadParameters";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InsufficientExceedances: return "InsufficientExceedances";
    case ErrorCode::ZeroModulus: return "ZeroModulus";
    case ErrorCode::InfiniteModulus: return "InfiniteModulus";
    case ErrorCode::DegeneratePolytope: return "DegeneratePolytope";
    case ErrorCode::BadNormingRule: return "BadNormingRule";
    case ErrorCode::MomentDiagnosticFailed: return "MomentDiagnosticFailed";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

  /// True for failures caused by too little data rather than bad input.
  [[nodiscard]] bool is_statistical() const noexcept {
    return code_ == ErrorCode::InsufficientData || code_ == ErrorCode::InsufficientExceedances ||
           code_ == ErrorCode::TrivialResult || code_ == ErrorCode::TrivialPushforward;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace rvlab
