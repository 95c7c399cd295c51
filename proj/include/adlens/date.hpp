#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace adlens {

using Date = std::chrono::sys_days;

// Strict "YYYY-MM-DD"; throws Error(kParse) otherwise.
Date parse_date(std::string_view text);
std::string format_date(Date date);

}  // namespace adlens
