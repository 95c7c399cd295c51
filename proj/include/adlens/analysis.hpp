#pragma once

// Corpus-level hypothesis tests behind the report: theme x MF association
// per advertiser group, audience demographic contrasts, and the stationarity
// and Granger checks between daily deaths and ad impressions.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adlens/corpus.hpp"
#include "adlens/stats.hpp"

namespace adlens::analysis {

// ---- theme x moral foundation association ---------------------------------

struct AssociationGroup {
  std::string name;  // "all", an entity type or a political view
  std::optional<corpus::EntityType> entity_type;
  std::optional<corpus::PoliticalView> political_view;
};

// All ads, each entity type, then liberal and conservative advertisers.
std::vector<AssociationGroup> default_association_groups();

struct AssociationResult {
  AssociationGroup group;
  std::vector<std::string> rows;  // themes with at least one ad
  std::vector<std::string> cols;  // foundations with at least one ad
  std::vector<std::vector<std::int64_t>> counts;
  std::optional<stats::TestResult> test;
  std::string note;  // why the test was skipped
};

// Ads with an Unassigned theme are left out. Empty rows and columns are
// dropped before testing; a table that fails the chi-square preconditions
// is reported with a note instead of a result.
AssociationResult theme_mf_association(const corpus::Dataset& dataset, const AssociationGroup& group);

// ---- demographic contrasts ---------------------------------------------------

enum class ContrastKind {
  kFemaleVsMale,  // Welch t: female vs male samples at one age bucket
  kStateReach,    // one-sample t of the age bucket's samples in a state against 0
};

struct Contrast {
  ContrastKind kind = ContrastKind::kFemaleVsMale;
  Theme theme = Theme::kEncourageVaccination;
  corpus::AgeBucket age = corpus::AgeBucket::k25_34;
  std::string state;  // kStateReach only
  std::string null_hypothesis;
};

std::vector<Contrast> default_contrasts();

struct ContrastResult {
  Contrast contrast;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  std::optional<stats::TestResult> test;
  std::string note;
};

std::vector<ContrastResult> demographic_tests(const corpus::Dataset& dataset,
                                              std::span<const Contrast> contrasts);

// ---- deaths vs impressions -------------------------------------------------

struct StationarityResult {
  std::string series;
  std::optional<stats::AdfResult> adf;
  std::string note;
};

struct GrangerRow {
  std::size_t lag = 0;
  stats::TestResult deaths_to_ads;
  stats::TestResult ads_to_deaths;
};

struct CausalityResult {
  Date start{};
  Date end{};
  std::vector<Theme> themes;
  std::vector<StationarityResult> stationarity;
  std::vector<GrangerRow> rows;
  std::vector<std::size_t> skipped_lags;  // too few observations
};

// Statsmodels-style default ADF lag bound: ceil(12 (n/100)^(1/4)), capped so
// the regression stays identified.
std::size_t default_adf_max_lag(std::size_t n);

// The window is the span of start dates of ads whose theme is in `themes`
// (every ad when `themes` is empty). The deaths series must cover it
// (kInvalidArgument otherwise). Lags 1..max_lag are tested in both
// directions.
CausalityResult causality(const corpus::Dataset& dataset, const corpus::TimeSeries& deaths,
                          std::span<const Theme> themes, std::size_t max_lag);

}  // namespace adlens::analysis
