#pragma once

#include <stdexcept>
#include <string>

namespace pivotal {

enum class ErrorCode {
  NonPositiveTotal,
  WeightTooLarge,
  LengthBelowK,
  IndexOutOfRange,
  DomainError,
  InvalidPermutation,
  TooLarge,
  NumericFailure,
  ParseError,
  UsageError,
};

const char* error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  const char* name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pivotal
