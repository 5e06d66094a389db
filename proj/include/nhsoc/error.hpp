#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nhsoc {

enum class ErrorCode {
  InvalidInput,
  EpDegenerate,
  OutOfRange,
  PoleEncountered,
  NoDamping,
  NoTransition,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::EpDegenerate: return "EpDegenerate";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::PoleEncountered: return "PoleEncountered";
    case ErrorCode::NoDamping: return "NoDamping";
    case ErrorCode::NoTransition: return "NoTransition";
  }
  return "Unknown";
}

/// Every failure raised by the numerical modules carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace nhsoc
