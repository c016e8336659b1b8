#pragma once

#include <stdexcept>
#include <string>

namespace fracprox {

enum class ErrorCode {
  DimensionMismatch,
  NonpositiveDenominator,
  NegativeNumerator,
  OracleFailure,
  InvalidParam,
  NotPositiveDefinite,
  NotPSD,
  TauBelowBound,
  InfeasibleBlock,
  DimensionTooLarge,
  TooFewPoints,
  EmptyInput,
  InvalidShape,
};

const char* to_string(ErrorCode code);

/// Library-wide exception. `block` is the offending block index, or -1 when
/// the error is not tied to a block.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int block = -1)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        block_(block) {}

  ErrorCode code() const noexcept { return code_; }
  int block() const noexcept { return block_; }

 private:
  ErrorCode code_;
  int block_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonpositiveDenominator: return "NonpositiveDenominator";
    case ErrorCode::NegativeNumerator: return "NegativeNumerator";
    case ErrorCode::OracleFailure: return "OracleFailure";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::TauBelowBound: return "TauBelowBound";
    case ErrorCode::InfeasibleBlock: return "InfeasibleBlock";
    case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InvalidShape: return "InvalidShape";
  }
  return "Unknown";
}

}  // namespace fracprox
