#include "adlens/text.hpp"

#include <cctype>
#include <cstdio>

namespace adlens::text {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::isalpha(u) != 0;
}
bool is_alnum(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::isalnum(u) != 0;
}
char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(c);
  return out;
}

std::string normalize_content(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(lower(c));
  }
  return out;
}

std::vector<std::string> alpha_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : s) {
    if (is_alpha(c)) {
      current.push_back(lower(c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) tokens.emplace_back(s.substr(start, i - start));
  }
  return tokens;
}

std::string clean_token(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !is_alnum(token[b])) ++b;
  while (e > b && !is_alnum(token[e - 1])) --e;
  return to_lower(token.substr(b, e - b));
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

const std::unordered_set<std::string>& english_stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",      "about",  "above",   "after",  "again",  "against", "all",
      "am",     "an",     "and",     "any",    "are",    "as",      "at",
      "be",     "because", "been",   "before", "being",  "below",   "between",
      "both",   "but",    "by",      "can",    "could",  "did",     "do",
      "does",   "doing",  "don",     "down",   "during", "each",    "few",
      "for",    "from",   "further", "had",    "has",
      "have",   "having", "he",      "her",    "here",   "hers",    "herself",
      "him",    "himself", "his",    "how",    "i",      "if",      "in",
      "into",   "is",     "it",      "its",    "itself", "just",    "ll",
      "me",     "more",   "most",    "my",     "myself", "no",      "nor",
      "not",    "now",    "of",      "off",    "on",     "once",    "only",
      "or",     "other",  "our",     "ours",   "ourselves", "out",  "over",
      "own",    "re",     "s",       "same",   "she",    "should",  "so",
      "some",   "such",   "t",       "than",   "that",   "the",     "their",
      "theirs", "them",   "themselves", "then", "there", "these",   "they",
      "this",   "those",  "through", "to",     "too",    "under",   "until",
      "up",     "us",     "ve",      "very",   "was",    "we",      "were",
      "what",   "when",   "where",   "which",  "while",  "who",     "whom",
      "why",    "will",   "with",    "won",    "would",  "you",     "your",
      "yours",  "yourself", "yourselves",
  };
  return words;
}

}  // namespace adlens::text
