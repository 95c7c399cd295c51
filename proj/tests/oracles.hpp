#pragma once

// Brute-force reference implementations shared by the unit tests and the
// acceptance runner.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "adlens/embed.hpp"
#include "adlens/rng.hpp"
#include "adlens/weaklabel.hpp"

namespace oracles {

using namespace adlens;
using namespace adlens::weaklabel;

inline double oracle_cos_dist(const embed::Vector& a, const embed::Vector& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return 1.0 - std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

inline std::vector<std::string> oracle_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline MoralFoundation oracle_mf(const std::string& body, const Lexicon& lex) {
  std::array<int, kFoundationCount> counts{};
  for (const auto& tok : oracle_tokens(body)) {
    std::array<bool, kFoundationCount> hit{};
    for (const auto& e : lex.entries) {
      const bool m = e.wildcard ? tok.rfind(e.stem, 0) == 0 : tok == e.stem;
      if (m) hit[static_cast<std::size_t>(e.foundation)] = true;
    }
    for (std::size_t f = 0; f < kFoundationCount; ++f) counts[f] += hit[f] ? 1 : 0;
  }
  int best = -1;
  int best_count = 0;
  for (std::size_t f = 0; f < kFoundationCount; ++f) {
    if (static_cast<MoralFoundation>(f) == MoralFoundation::kLiberty && counts[f] < lex.liberty_min) continue;
    if (counts[f] > best_count) {
      best = static_cast<int>(f);
      best_count = counts[f];
    }
  }
  return best < 0 ? MoralFoundation::kNone : static_cast<MoralFoundation>(best);
}

inline embed::Vector random_vector(Rng& rng, std::size_t dim) {
  embed::Vector v(dim);
  for (double& x : v) x = standard_normal(rng);
  return v;
}

}  // namespace oracles
