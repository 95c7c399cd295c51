#include "adlens/error.hpp"

namespace adlens {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
      return "E_IO";
    case ErrorCode::kParse:
      return "E_PARSE";
    case ErrorCode::kInvalidArgument:
      return "E_INVALID";
    case ErrorCode::kNotFound:
      return "E_NOT_FOUND";
    case ErrorCode::kDegenerate:
      return "E_DEGENERATE";
    case ErrorCode::kNumeric:
      return "E_NUMERIC";
  }
  return "E_UNKNOWN";
}

}  // namespace adlens
