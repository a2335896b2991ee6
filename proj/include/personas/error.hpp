#pragma once

#include <stdexcept>
#include <string>

namespace personas {

// Stable error codes; the CLI prints them in its JSON error payload.
enum class ErrorCode {
  invalid_argument,
  schema_error,
  data_error,
  validation_failed,
  degenerate_input,
  io_error,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace personas
