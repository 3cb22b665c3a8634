#pragma once

#include <stdexcept>
#include <string>

namespace kleinian {

enum class ErrorCode {
  InvalidArgument,
  DegenerateComposition,
  FixesInfinity,
  ClassificationUnstable,
  SingularMatrix,
  UnknownLabel,
  HypothesisViolated,
  SharedFixedPoint,
  NoIntersection,
  Tangent,
  WitnessMissing,
  InfinityStabilized,
  DegenerateHexahedron,
  PowerFixesInfinity,
  IoFailure,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateComposition: return "DegenerateComposition";
    case ErrorCode::FixesInfinity: return "FixesInfinity";
    case ErrorCode::ClassificationUnstable: return "ClassificationUnstable";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::SharedFixedPoint: return "SharedFixedPoint";
    case ErrorCode::NoIntersection: return "NoIntersection";
    case ErrorCode::Tangent: return "Tangent";
    case ErrorCode::WitnessMissing: return "WitnessMissing";
    case ErrorCode::InfinityStabilized: return "InfinityStabilized";
    case ErrorCode::DegenerateHexahedron: return "DegenerateHexahedron";
    case ErrorCode::PowerFixesInfinity: return "PowerFixesInfinity";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Single exception type of the library; inspect code() to branch.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kleinian
