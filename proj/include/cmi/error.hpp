#ifndef CMI_ERROR_HPP_
#define CMI_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmi {

enum class ErrorCode {
  TooFewObservations,
  NonFiniteInput,
  IndexOutOfRange,
  AlphaOutOfRange,
  EmptyContactSet,
  ScaleTooSmall,
  InvalidSchedule,
  InvalidArgument,
  MismatchedCovariates,
  InvalidSpec,
  InvalidConfig,
  MalformedCsv,
  IoFailure,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; `code()` lets callers
// branch on the failure without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cmi

#endif  // CMI_ERROR_HPP_
