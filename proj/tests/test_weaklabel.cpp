#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "adlens/error.hpp"
#include "adlens/rng.hpp"
#include "adlens/weaklabel.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace adlens;
using namespace adlens::weaklabel;
using namespace oracles;

namespace {

double oracle_silhouette(const std::vector<int>& labels, const std::vector<embed::Vector>& pts) {
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::map<int, std::pair<double, int>> sums;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      auto& s = sums[labels[j]];
      s.first += oracle_cos_dist(pts[i], pts[j]);
      s.second += 1;
    }
    const auto own = sums.find(labels[i]);
    if (own == sums.end()) continue;  // singleton
    const double a = own->second.first / own->second.second;
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [lab, s] : sums) {
      if (lab != labels[i]) b = std::min(b, s.first / s.second);
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(pts.size());
}

}  // namespace

TEST_CASE("theme assignment matches an exhaustive nearest-phrase scan") {
  Rng rng(2024);
  const std::size_t dim = 8;
  PhraseBank bank;
  for (Theme t : all_themes()) {
    for (int k = 0; k < 3; ++k) bank.phrases.push_back({t, "p", random_vector(rng, dim)});
  }
  for (double threshold : {0.0, 0.3, 0.6, 1.0, 2.0}) {
    for (int trial = 0; trial < 200; ++trial) {
      const auto doc = random_vector(rng, dim);
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < bank.phrases.size(); ++i) {
        const double d = oracle_cos_dist(doc, bank.phrases[i].vector);
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      const Theme expected = best_d <= threshold ? bank.phrases[best].theme : Theme::kUnassigned;
      const auto got = assign_theme(doc, bank, threshold);
      CHECK(got.theme == expected);
      CHECK(got.phrase_index == best);
      CHECK(got.distance == doctest::Approx(best_d).epsilon(1e-12));
    }
  }
}

TEST_CASE("threshold zero only assigns exact phrase vectors") {
  PhraseBank bank;
  bank.phrases = {{Theme::kVote, "a", {1, 0, 0}}, {Theme::kGovTrust, "b", {0, 1, 0}}};
  const embed::Vector exact = {0, 2, 0};
  CHECK(assign_theme(exact, bank, 0.0).theme == Theme::kGovTrust);
  const embed::Vector near = {0.01, 1, 0};
  CHECK(assign_theme(near, bank, 0.0).theme == Theme::kUnassigned);
  const embed::Vector zero = {0, 0, 0};
  CHECK_THROWS_AS(assign_theme(zero, bank, 0.5), Error);
  CHECK_THROWS_AS(assign_theme(exact, PhraseBank{}, 0.5), Error);
}

TEST_CASE("MF assignment matches a count-and-argmax oracle") {
  const Lexicon& lex = default_lexicon();
  std::vector<std::string> vocab = {"the", "shot", "clinic", "people", "today"};
  for (const auto& e : lex.entries) vocab.push_back(e.wildcard ? e.stem + "ing" : e.stem);
  Rng rng(99);
  int liberty_cases = 0;
  int tie_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::string body;
    const std::size_t len = 1 + uniform_index(rng, 8);
    for (std::size_t i = 0; i < len; ++i) body += vocab[uniform_index(rng, vocab.size())] + " ";
    const auto counts = score_mf(body, lex);
    if (counts[MoralFoundation::kLiberty] >= 1) ++liberty_cases;
    const int mx = *std::max_element(counts.counts.begin(), counts.counts.end());
    if (mx > 0 && std::count(counts.counts.begin(), counts.counts.end(), mx) > 1) ++tie_cases;
    CHECK(assign_mf(counts, lex.liberty_min) == oracle_mf(body, lex));
  }
  CHECK(liberty_cases > 20);
  CHECK(tie_cases > 20);
}

TEST_CASE("liberty needs two hits and ties go to the earlier foundation") {
  const Lexicon& lex = default_lexicon();
  CHECK(assign_mf(score_mf("freedom", lex), lex.liberty_min) == MoralFoundation::kNone);
  CHECK(assign_mf(score_mf("freedom and liberty", lex), lex.liberty_min) == MoralFoundation::kLiberty);
  CHECK(assign_mf(score_mf("protect our nation", lex), lex.liberty_min) == MoralFoundation::kCare);
  CHECK(assign_mf(score_mf("clinic hours", lex), lex.liberty_min) == MoralFoundation::kNone);
  MfCounts c;
  c[MoralFoundation::kLoyalty] = 2;
  c[MoralFoundation::kAuthority] = 2;
  CHECK(assign_mf(c, 2) == MoralFoundation::kLoyalty);
}

TEST_CASE("lexicon parsing") {
  std::istringstream in("# comment\nprotect*\tCareHarm\nfair\tFairness\n");
  const auto lex = parse_lexicon(in);
  REQUIRE(lex.entries.size() == 2);
  CHECK(lex.entries[0].wildcard);
  CHECK(lex.entries[0].matches("protection"));
  CHECK_FALSE(lex.entries[1].matches("fairly"));
  std::istringstream bad("protect CareHarm\n");
  CHECK_THROWS_AS(parse_lexicon(bad), Error);
  std::istringstream unknown("x\tHonor\n");
  CHECK_THROWS_AS(parse_lexicon(unknown), Error);
}

TEST_CASE("default phrase list covers every theme") {
  std::set<Theme> seen;
  for (const auto& [t, _] : default_phrase_texts()) seen.insert(t);
  CHECK(seen.size() == kThemeCount);
  std::istringstream in(R"({"Vote": ["go vote"], "GovTrust": ["trust experts"]})");
  const auto texts = parse_phrase_json(in);
  CHECK(texts.size() == 2);
  embed::EmbeddingSource src{nullptr, embed::FallbackEncoder{16, 0}};
  CHECK_THROWS_AS(build_phrase_bank(texts, src), Error);
  const auto bank = build_phrase_bank(default_phrase_texts(), src);
  CHECK(bank.dim() == 16);
}

TEST_CASE("silhouette agrees with a brute-force computation") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 6 + uniform_index(rng, 10);
    std::vector<int> labels;
    std::vector<embed::Vector> pts;
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back(static_cast<int>(uniform_index(rng, 3)));
      pts.push_back(random_vector(rng, 4));
    }
    labels[0] = 0;
    labels[1] = 1;
    const double s = silhouette_score(labels, pts);
    CHECK(s == doctest::Approx(oracle_silhouette(labels, pts)).epsilon(1e-12));
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
  }
  const std::vector<int> one = {0, 0};
  const std::vector<embed::Vector> two = {{1, 0}, {0, 1}};
  CHECK_THROWS_AS(silhouette_score(one, two), Error);
}

TEST_CASE("well separated clusters score close to one") {
  const std::vector<int> labels = {0, 0, 1, 1};
  const std::vector<embed::Vector> pts = {{1, 0.01}, {1, -0.01}, {0.01, 1}, {-0.01, 1}};
  CHECK(silhouette_score(labels, pts) > 0.95);
}

TEST_CASE("weak quality scores over shared ids") {
  using testutil::label;
  std::map<std::string, corpus::LabelPair> weak = {
      {"a", label("a", Theme::kVote, MoralFoundation::kCare, LabelSource::kWeak)},
      {"b", label("b", Theme::kUnassigned, MoralFoundation::kNone, LabelSource::kWeak)},
      {"z", label("z", Theme::kVote, MoralFoundation::kCare, LabelSource::kWeak)}};
  std::map<std::string, corpus::LabelPair> gold = {{"a", label("a", Theme::kVote, MoralFoundation::kCare)},
                                                   {"b", label("b", Theme::kVote, MoralFoundation::kNone)}};
  const auto q = weak_quality(weak, gold);
  CHECK(q.theme.n == 2);
  CHECK(q.theme.accuracy == doctest::Approx(0.5));
  CHECK(q.mf.accuracy == doctest::Approx(1.0));
  std::map<std::string, corpus::LabelPair> none;
  CHECK_THROWS_AS(weak_quality(none, gold), Error);
}

TEST_CASE("generate_weak_labels emits one weak label per ad") {
  corpus::Dataset d;
  for (int i = 0; i < 5; ++i) {
    d.records.push_back(testutil::ad("ad" + std::to_string(i), "protect the clinic number " + std::to_string(i)));
  }
  embed::EmbeddingSource src{nullptr, embed::FallbackEncoder{32, 0}};
  const auto bank = build_phrase_bank(default_phrase_texts(), src);
  const auto run = generate_weak_labels(d, default_lexicon(), bank, src, 0.0);
  REQUIRE(run.labels.size() == 5);
  for (const auto& l : run.labels) {
    CHECK(l.source == LabelSource::kWeak);
    CHECK(l.theme == Theme::kUnassigned);
    CHECK(l.mf == MoralFoundation::kCare);
  }
  CHECK_FALSE(run.silhouette);
}
