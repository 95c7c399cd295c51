#include "adlens/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

#include "adlens/text.hpp"
#include "adlens/weaklabel.hpp"

namespace adlens::synth {
namespace {

const std::vector<std::string> kFiller = {
    "today",   "people",  "week",    "news",    "local",     "update", "information", "visit",
    "learn",   "more",    "share",   "city",    "county",    "weekend", "morning",    "online",
    "details", "website", "program", "neighbors", "season",  "street", "office",      "summer"};

const std::array<std::vector<std::string>, kFoundationCount> kCues = {{
    {"safety", "protect", "harm", "suffering", "vulnerable"},
    {"fairness", "equality", "justice", "rights", "honest"},
    {"loyalty", "community", "nation", "together", "patriots"},
    {"authority", "respect", "law", "obey", "tradition"},
    {"sacred", "purity", "holy", "blessed", "soul"},
    {"freedom", "liberty", "choice", "mandates", "tyranny"},
}};

struct Funder {
  const char* name;
  corpus::EntityType type;
};

constexpr Funder kFunders[] = {
    {"State Health Department", corpus::EntityType::kPublicHealth},
    {"County Public Health", corpus::EntityType::kPublicHealth},
    {"Main Street Pharmacy", corpus::EntityType::kCommercial},
    {"Community Care Network", corpus::EntityType::kNonprofit},
    {"Citizens for Liberty PAC", corpus::EntityType::kPolitical},
    {"Vote Forward Committee", corpus::EntityType::kPolitical},
};

constexpr const char* kStates[] = {"Wyoming", "Massachusetts", "California", "Texas", "Ohio"};

bool hits_lexicon(const std::string& token) {
  for (const auto& e : weaklabel::default_lexicon().entries) {
    if (e.matches(token)) return true;
  }
  return false;
}

std::vector<std::vector<std::string>> build_signatures() {
  std::vector<std::set<std::string>> words(kThemeCount);
  for (const auto& [theme, phrase] : weaklabel::default_phrase_texts()) {
    for (auto& tok : text::alpha_tokens(phrase)) words[index_of(theme)].insert(std::move(tok));
  }
  const auto& stop = text::english_stopwords();
  const std::set<std::string> filler(kFiller.begin(), kFiller.end());
  std::vector<std::vector<std::string>> out(kThemeCount);
  for (std::size_t t = 0; t < kThemeCount; ++t) {
    for (const auto& w : words[t]) {
      if (w.size() < 3 || stop.contains(w) || filler.contains(w) || hits_lexicon(w)) continue;
      bool unique = true;
      for (std::size_t o = 0; o < kThemeCount && unique; ++o) {
        if (o != t && words[o].contains(w)) unique = false;
      }
      if (unique) out[t].push_back(w);
    }
    if (out[t].empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "theme " + std::string(theme_name(theme_from_index(t))) + " has no signature words");
    }
  }
  return out;
}

template <class T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[uniform_index(rng, v.size())];
}

// Replaces `cls` by a uniformly chosen different class with probability p.
std::size_t corrupt(std::size_t cls, std::size_t classes, double p, Rng& rng) {
  if (uniform01(rng) >= p) return cls;
  const std::size_t other = uniform_index(rng, classes - 1);
  return other >= cls ? other + 1 : other;
}

std::string padded(std::size_t v, int width) {
  std::string s = std::to_string(v);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

// Non-negative shares that sum to one after rounding to four decimals.
std::vector<double> shares(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - uniform01(rng));
    total += x;
  }
  double assigned = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    w[i] = std::round(w[i] / total * 1e4) / 1e4;
    assigned += w[i];
  }
  w[n - 1] = std::max(0.0, std::round((1.0 - assigned) * 1e4) / 1e4);
  return w;
}

}  // namespace

const std::vector<std::string>& theme_signature(Theme theme) {
  static const std::vector<std::vector<std::string>> sig = build_signatures();
  if (theme == Theme::kUnassigned) {
    throw Error(ErrorCode::kInvalidArgument, "Unassigned has no signature words");
  }
  return sig[index_of(theme)];
}

const std::vector<std::string>& mf_cues(MoralFoundation mf) {
  static const std::vector<std::string> none;
  if (mf == MoralFoundation::kNone) return none;
  return kCues[index_of(mf)];
}

std::string make_body(Theme theme, MoralFoundation mf, Rng& rng) {
  std::vector<std::string> words;
  const auto& sig = theme_signature(theme);
  for (int i = 0; i < 3; ++i) words.push_back(pick(sig, rng));
  const auto& cues = mf_cues(mf);
  if (!cues.empty()) {
    // Two distinct cues keep the lexicon count unambiguous.
    const std::size_t a = uniform_index(rng, cues.size());
    const std::size_t b = (a + 1 + uniform_index(rng, cues.size() - 1)) % cues.size();
    words.push_back(cues[a]);
    words.push_back(cues[b]);
  }
  for (int i = 0; i < 4; ++i) words.push_back(pick(kFiller, rng));
  shuffle_in_place(words, rng);
  std::ostringstream out;
  for (std::size_t i = 0; i < words.size(); ++i) out << (i ? " " : "") << words[i];
  return out.str();
}

Benchmark make_benchmark(const BenchmarkOptions& o) {
  if (!(o.noise >= 0.0 && o.noise < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "noise must lie in [0, 1)");
  }
  Rng rng(o.seed);
  Benchmark b;
  const Date start = parse_date("2021-01-01");
  const auto add = [&](corpus::Dataset& d, std::string id, Theme theme, MoralFoundation mf,
                       LabelSource source, std::size_t i) {
    corpus::AdRecord r;
    r.id = id;
    r.body = make_body(theme, mf, rng);
    r.start_date = start + std::chrono::days{static_cast<int>(i % 365)};
    d.records.push_back(r);
    d.labels[id] = {id, theme, mf, source};
  };
  for (std::size_t i = 0; i < o.gold; ++i) {
    const Theme theme = theme_from_index(uniform_index(rng, kThemeCount));
    const MoralFoundation mf = mf_from_index(uniform_index(rng, kMfClassCount));
    add(b.gold, "g" + padded(i, 5), theme, mf, LabelSource::kGold, i);
  }
  for (std::size_t i = 0; i < o.weak; ++i) {
    const std::size_t t = uniform_index(rng, kThemeCount);
    const std::size_t m = uniform_index(rng, kMfClassCount);
    const std::string id = "w" + padded(i, 5);
    add(b.weak_clean, id, theme_from_index(t), mf_from_index(m), LabelSource::kWeak, i);
    b.weak.records.push_back(b.weak_clean.records.back());
    b.weak.labels[id] = {id, theme_from_index(corrupt(t, kThemeCount, o.noise, rng)),
                         mf_from_index(corrupt(m, kMfClassCount, o.noise, rng)), LabelSource::kWeak};
  }
  return b;
}

Fixture make_fixture(const FixtureOptions& o) {
  if (o.gold > o.ads || o.ads == 0) {
    throw Error(ErrorCode::kInvalidArgument, "fixture needs 0 < gold <= ads");
  }
  Rng rng(o.seed);
  Fixture f;
  const Date start = parse_date("2021-03-01");

  std::vector<double> deaths(o.ads + o.planted_lag);
  for (double& d : deaths) d = std::max(0.0, std::round(100.0 + 20.0 * standard_normal(rng)));
  f.deaths.name = "Deaths(t)";
  for (std::size_t t = 0; t < o.ads; ++t) {
    f.deaths.dates.push_back(start + std::chrono::days{static_cast<int>(t)});
    f.deaths.values.push_back(deaths[t + o.planted_lag]);
  }

  for (std::size_t t = 0; t < o.ads; ++t) {
    const Theme theme = theme_from_index(uniform_index(rng, kThemeCount));
    const MoralFoundation mf = mf_from_index(uniform_index(rng, kMfClassCount));
    const Funder& funder = kFunders[uniform_index(rng, std::size(kFunders))];
    corpus::AdRecord r;
    r.id = "ad" + padded(t + 1, 3);
    r.body = make_body(theme, mf, rng);
    r.funding_entity = funder.name;
    r.entity_type = funder.type;
    r.political_view = static_cast<corpus::PoliticalView>(uniform_index(rng, 3));
    const double spend_lo = 100.0 * static_cast<double>(1 + uniform_index(rng, 50));
    r.spend = {spend_lo, spend_lo + 99.0};
    // deaths[t] is the value planted_lag days before this ad's date.
    const double mid = std::round(20000.0 + 150.0 * deaths[t] + 300.0 * standard_normal(rng));
    r.impressions = {mid - 500.0, mid + 500.0};
    const auto demo = shares(12, rng);
    for (std::size_t i = 0; i < 12; ++i) {
      r.demographics.push_back({static_cast<corpus::AgeBucket>(i / 2),
                                i % 2 == 0 ? corpus::Gender::kFemale : corpus::Gender::kMale, demo[i]});
    }
    const auto reg = shares(3, rng);
    const std::size_t first_state = uniform_index(rng, std::size(kStates));
    for (std::size_t i = 0; i < 3; ++i) {
      r.regions.push_back({kStates[(first_state + i) % std::size(kStates)], reg[i]});
    }
    r.start_date = start + std::chrono::days{static_cast<int>(t)};
    corpus::validate_record(r);
    f.truth.push_back({r.id, theme, mf, LabelSource::kGold});
    f.ads.records.push_back(std::move(r));
  }
  const auto order = shuffled_indices(o.ads, o.seed);
  std::vector<std::size_t> gold_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(o.gold));
  std::sort(gold_idx.begin(), gold_idx.end());
  for (std::size_t i : gold_idx) f.gold.push_back(f.truth[i]);
  return f;
}

}  // namespace adlens::synth
