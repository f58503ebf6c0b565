#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sgrag {

// Every failure mode the library reports. Codes map onto the four CLI exit
// classes via error_exit_code().
enum class ErrorCode {
  usage,                  // bad flags, bad config keys/values
  config,                 // inconsistent or missing runtime configuration
  parse,                  // malformed input document
  validation,             // well-formed input violating an invariant
  referential_integrity,  // relation endpoint does not resolve
  vocabulary,             // label/predicate missing from a vocabulary
  dimension,              // tensor/vector shape mismatch
  input,                  // empty or otherwise unusable argument
  conflict,               // duplicate id where uniqueness is required
  version_mismatch,       // persisted artifact written by another format version
  checksum_mismatch,      // persisted artifact failed its integrity check
  truncated_file,         // persisted artifact ends early
  non_differentiable,     // gradient requested at a kink
  transport,              // HTTP/network failure after retries
  internal,               // bug trap
};

std::string_view error_code_name(ErrorCode code);

// 2 = usage, 3 = data, 4 = transport, 5 = internal.
int error_exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sgrag
