#include "core/error.hpp"

namespace tourkit {

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::validation: return "validation";
    case ErrorCode::domain: return "domain";
    case ErrorCode::unknown_command: return "unknown_command";
    case ErrorCode::config: return "config";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

}  // namespace tourkit
