#include "cmi/error.hpp"

namespace cmi {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::TooFewObservations: return "TooFewObservations";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::EmptyContactSet: return "EmptyContactSet";
    case ErrorCode::ScaleTooSmall: return "ScaleTooSmall";
    case ErrorCode::InvalidSchedule: return "InvalidSchedule";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MismatchedCovariates: return "MismatchedCovariates";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

}  // namespace cmi
