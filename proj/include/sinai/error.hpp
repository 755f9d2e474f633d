#pragma once

#include <stdexcept>
#include <string>

namespace sinai {

enum class ErrorCode {
  InvalidLaw,
  ExtensionBudgetExceeded,
  RangeError,
  RejectionBudgetExceeded,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidLaw: return "InvalidLaw";
    case ErrorCode::ExtensionBudgetExceeded: return "ExtensionBudgetExceeded";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace sinai
