#pragma once

// Seeded synthetic corpora: a labeled gold/weak benchmark whose classes are
// separable by token identity, and a small fully-populated ad fixture with a
// deaths series that leads daily impressions by a planted lag.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "adlens/corpus.hpp"
#include "adlens/labels.hpp"
#include "adlens/rng.hpp"

namespace adlens::synth {

// Tokens that only occur in one theme's built-in phrases (stopwords and MF
// cue words removed), sorted.
const std::vector<std::string>& theme_signature(Theme theme);
// Cue words that hit the given foundation in the default lexicon; empty for
// None.
const std::vector<std::string>& mf_cues(MoralFoundation mf);

// Signature words, MF cues (two for Liberty so it clears the minimum) and
// neutral filler, shuffled.
std::string make_body(Theme theme, MoralFoundation mf, Rng& rng);

struct BenchmarkOptions {
  std::size_t gold = 100;
  std::size_t weak = 2000;
  double noise = 0.4;  // chance each weak label is replaced by another class
  std::uint64_t seed = 0;
};

struct Benchmark {
  corpus::Dataset gold;
  corpus::Dataset weak;
  corpus::Dataset weak_clean;  // weak ads with their true labels
};

Benchmark make_benchmark(const BenchmarkOptions& options);

struct FixtureOptions {
  std::size_t ads = 50;
  std::size_t gold = 20;
  std::size_t planted_lag = 3;
  std::uint64_t seed = 7;
};

struct Fixture {
  corpus::Dataset ads;  // unlabeled, one ad per day
  std::vector<corpus::LabelPair> gold;
  std::vector<corpus::LabelPair> truth;  // true labels of every ad
  corpus::TimeSeries deaths;
};

Fixture make_fixture(const FixtureOptions& options);

}  // namespace adlens::synth
