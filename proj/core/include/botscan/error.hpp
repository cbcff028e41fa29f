#pragma once

#include <stdexcept>
#include <string>

namespace botscan {

enum class ErrorCode {
  invalid_argument,
  credential,
  not_found,
  rate_limited,
  network,
  malformed_response,
  io,
  parse,
  data,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception type raised by every botscan module. The code tells callers
/// (the CLI in particular) which failure class occurred.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace botscan
