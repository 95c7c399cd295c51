#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace adlens::text {

std::string to_lower(std::string_view s);

// Lowercase, trim, and collapse every whitespace run to one space.
std::string normalize_content(std::string_view s);

// Maximal runs of ASCII letters, lowercased.
std::vector<std::string> alpha_tokens(std::string_view s);

// Split on whitespace, keeping tokens verbatim.
std::vector<std::string> whitespace_tokens(std::string_view s);

// Lowercase and strip leading/trailing non-alphanumeric characters.
std::string clean_token(std::string_view token);

std::string_view trim(std::string_view s);

std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

// Bundled English stopword list (version 1).
const std::unordered_set<std::string>& english_stopwords();
inline constexpr int kStopwordListVersion = 1;

}  // namespace adlens::text
