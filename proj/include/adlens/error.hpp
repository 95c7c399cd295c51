#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adlens {

// Stable categories; the CLI prints them as an "E_<NAME>" prefix on stderr.
enum class ErrorCode {
  kIo,
  kParse,
  kInvalidArgument,
  kNotFound,
  kDegenerate,
  kNumeric,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace adlens
