#pragma once

#include <stdexcept>
#include <string>

namespace tourkit {

// Mirrors tk_status in the C API; values must stay in sync.
enum class ErrorCode {
  invalid_argument = 1,
  io = 2,
  parse = 3,
  validation = 4,
  domain = 5,
  unknown_command = 6,
  config = 7,
  internal = 8,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tourkit
