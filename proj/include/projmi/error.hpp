#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace projmi {

enum class ErrorKind {
  NotHermitian,
  NotPositive,
  TraceNotOne,
  NotSquare,
  DimensionMismatch,
  EigenDecompositionFailure,
  UnknownFamily,
  BadParameter,
  ZeroVector,
  InvalidFrame,
  BaseMismatch,
  NonFiniteSample,
  MarginalZeroAnomaly,
  ReconstructionOutOfTolerance,
  QuadratureNotConverged,
  ParseError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::TraceNotOne: return "TraceNotOne";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EigenDecompositionFailure: return "EigenDecompositionFailure";
    case ErrorKind::UnknownFamily: return "UnknownFamily";
    case ErrorKind::BadParameter: return "BadParameter";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::InvalidFrame: return "InvalidFrame";
    case ErrorKind::BaseMismatch: return "BaseMismatch";
    case ErrorKind::NonFiniteSample: return "NonFiniteSample";
    case ErrorKind::MarginalZeroAnomaly: return "MarginalZeroAnomaly";
    case ErrorKind::ReconstructionOutOfTolerance: return "ReconstructionOutOfTolerance";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Errors caused by malformed user input rather than by numerics.
inline bool is_usage_error(ErrorKind kind) {
  return kind == ErrorKind::UnknownFamily || kind == ErrorKind::BadParameter ||
         kind == ErrorKind::ParseError || kind == ErrorKind::DimensionMismatch ||
         kind == ErrorKind::NotSquare;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace projmi
