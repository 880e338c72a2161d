#pragma once

#include <stdexcept>
#include <string>

namespace fnmetric {

enum class ErrorCode {
  BadInput,
  EllipticElement,
  InvalidLength,
  DecompositionMismatch,
  IncomparablePoints,
  NoTwistParameter,
  NotMovable,
  OverlappingNeighborhoods,
  FiniteOnly,
  TwistRecoveryFailed,
  NotRealizable,
  BadGrid,
  BadConfiguration,
  AngleConditionFailed,
  BadBasePoint,
};

inline const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::BadInput: return "BadInput";
    case ErrorCode::EllipticElement: return "EllipticElement";
    case ErrorCode::InvalidLength: return "InvalidLength";
    case ErrorCode::DecompositionMismatch: return "DecompositionMismatch";
    case ErrorCode::IncomparablePoints: return "IncomparablePoints";
    case ErrorCode::NoTwistParameter: return "NoTwistParameter";
    case ErrorCode::NotMovable: return "NotMovable";
    case ErrorCode::OverlappingNeighborhoods: return "OverlappingNeighborhoods";
    case ErrorCode::FiniteOnly: return "FiniteOnly";
    case ErrorCode::TwistRecoveryFailed: return "TwistRecoveryFailed";
    case ErrorCode::NotRealizable: return "NotRealizable";
    case ErrorCode::BadGrid: return "BadGrid";
    case ErrorCode::BadConfiguration: return "BadConfiguration";
    case ErrorCode::AngleConditionFailed: return "AngleConditionFailed";
    case ErrorCode::BadBasePoint: return "BadBasePoint";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace fnmetric
