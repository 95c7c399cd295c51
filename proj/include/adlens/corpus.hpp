#pragma once

// Ad records, labels, and the corpus-level operations the analyses build on:
// ingestion, deduplication, splitting, agreement, aggregation, term counts
// and daily time series.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "adlens/date.hpp"
#include "adlens/error.hpp"
#include "adlens/labels.hpp"

namespace adlens::corpus {

enum class EntityType { kPublicHealth, kCommercial, kNonprofit, kPolitical, kUnknown };
enum class PoliticalView { kLiberal, kConservative, kUnknown };
enum class AgeBucket { k18_24, k25_34, k35_44, k45_54, k55_64, k65Plus, kUnknown };
enum class Gender { kMale, kFemale, kUnknown };

std::string_view entity_type_name(EntityType t);
std::string_view political_view_name(PoliticalView v);
std::string_view age_bucket_name(AgeBucket a);
std::string_view gender_name(Gender g);
// Unknown strings map to the kUnknown member.
EntityType parse_entity_type(std::string_view s);
PoliticalView parse_political_view(std::string_view s);
AgeBucket parse_age_bucket(std::string_view s);
Gender parse_gender(std::string_view s);

struct ValueRange {
  double lower = 0.0;
  double upper = 0.0;

  double midpoint() const { return 0.5 * (lower + upper); }
};

struct DemographicShare {
  AgeBucket age = AgeBucket::kUnknown;
  Gender gender = Gender::kUnknown;
  double share = 0.0;
};

struct RegionShare {
  std::string state;
  double share = 0.0;
};

struct AdRecord {
  std::string id;
  std::string body;
  std::string funding_entity;
  EntityType entity_type = EntityType::kUnknown;
  PoliticalView political_view = PoliticalView::kUnknown;
  ValueRange spend;
  ValueRange impressions;
  std::vector<DemographicShare> demographics;
  std::vector<RegionShare> regions;
  Date start_date{};
};

struct LabelPair {
  std::string ad_id;
  Theme theme = Theme::kUnassigned;
  MoralFoundation mf = MoralFoundation::kNone;
  LabelSource source = LabelSource::kGold;
};

struct Dataset {
  std::vector<AdRecord> records;
  std::map<std::string, LabelPair> labels;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  const LabelPair* label_for(std::string_view ad_id) const;
};

struct TimeSeries {
  std::string name;
  std::vector<Date> dates;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

inline constexpr double kShareTolerance = 0.02;

// Throws Error(kInvalidArgument) describing the first violated invariant.
void validate_record(const AdRecord& record);

// ---- ingestion -------------------------------------------------------------

enum class AdFormat { kJsonl, kCsv };

Dataset load_ads(const std::filesystem::path& path, AdFormat format);
Dataset parse_ads_jsonl(std::istream& in);
// Columns: id, body, funding_entity, entity_type, political_view,
// spend_lower, spend_upper, impressions_lower, impressions_upper, start_date,
// demographics ("age:gender:share;..."), regions ("state:share;...").
Dataset parse_ads_csv(std::istream& in);
void write_ads_jsonl(std::ostream& out, const Dataset& dataset);

std::vector<LabelPair> load_labels(const std::filesystem::path& path,
                                   LabelSource default_source = LabelSource::kGold);
std::vector<LabelPair> parse_labels_jsonl(std::istream& in, LabelSource default_source);
void write_labels_jsonl(std::ostream& out, std::span<const LabelPair> labels);

// Every label must name a record in the dataset; later labels for the same
// id replace earlier ones.
void attach_labels(Dataset& dataset, std::span<const LabelPair> labels);

// "date,new_deaths" CSV; every calendar day between first and last row must
// be present.
TimeSeries load_deaths_csv(const std::filesystem::path& path);
TimeSeries parse_deaths_csv(std::istream& in);
void write_deaths_csv(std::ostream& out, const TimeSeries& deaths);

// Order-sensitive hash over ids, bodies, and labels.
std::string dataset_digest(const Dataset& dataset);

// ---- transforms ------------------------------------------------------------

Dataset dedup_by_content(const Dataset& dataset);

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t val = 0;
  std::size_t test = 0;
};

SplitSizes split_sizes(std::size_t n, const SplitRatios& ratios);

// Index-level split: a seeded shuffle, then floor/floor/remainder slices.
struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};
IndexSplit split_indices(std::size_t n, const SplitRatios& ratios, std::uint64_t seed);

struct DatasetSplit {
  Dataset train;
  Dataset val;
  Dataset test;
};

DatasetSplit split(const Dataset& dataset, const SplitRatios& ratios, std::uint64_t seed);

// Subset that keeps the labels of retained records.
Dataset select(const Dataset& dataset, std::span<const std::size_t> indices);

// ---- agreement -------------------------------------------------------------

template <class Label>
double cohen_kappa(std::span<const Label> a, std::span<const Label> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cohen_kappa needs two non-empty sequences of equal length");
  }
  const double n = static_cast<double>(a.size());
  std::map<Label, double> freq_a;
  std::map<Label, double> freq_b;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) agree += 1.0;
    freq_a[a[i]] += 1.0;
    freq_b[b[i]] += 1.0;
  }
  const double p_o = agree / n;
  double p_e = 0.0;
  for (const auto& [label, count] : freq_a) {
    auto it = freq_b.find(label);
    if (it != freq_b.end()) p_e += (count / n) * (it->second / n);
  }
  if (p_e >= 1.0) {
    throw Error(ErrorCode::kDegenerate, "degenerate agreement: expected agreement is 1");
  }
  const double kappa = (p_o - p_e) / (1.0 - p_e);
  return kappa < -1.0 ? -1.0 : (kappa > 1.0 ? 1.0 : kappa);
}

template <class Label>
double cohen_kappa(const std::vector<Label>& a, const std::vector<Label>& b) {
  return cohen_kappa(std::span<const Label>(a), std::span<const Label>(b));
}

// ---- aggregation -----------------------------------------------------------

enum class GroupBy { kTheme, kMf, kEntityType, kFundingEntity, kAgeGender, kPoliticalView };
enum class Measure { kCount, kSpendMid, kImpressionsMid };

std::string_view group_by_name(GroupBy g);
std::string_view measure_name(Measure m);

inline constexpr std::string_view kUnlabeledBucket = "Unlabeled";

struct GroupValue {
  std::string group;
  double value = 0.0;
};

// Sorted by value descending, then group name ascending. Age/gender groups
// weight each ad's measure by its audience share.
std::vector<GroupValue> aggregate(const Dataset& dataset, GroupBy group_by, Measure measure);

struct CrossTab {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> values;  // rows x cols
};

// Rows and columns are sorted by name; only observed keys appear.
CrossTab crosstab(const Dataset& dataset, GroupBy rows, GroupBy cols, Measure measure);

struct TermCount {
  std::string term;
  std::size_t count = 0;
};

std::vector<TermCount> term_frequency(const Dataset& dataset, Theme theme, std::size_t top_k);

// Daily impression-midpoint sums over [start, end], zero on days without
// ads. An empty `themes` keeps every ad, labeled or not.
TimeSeries build_time_series(const Dataset& dataset, std::span<const Theme> themes,
                             Date start, Date end, std::string name = "AdsImpressions(t)");

// ---- audience samples ------------------------------------------------------

struct AudienceFilter {
  std::optional<AgeBucket> age;
  std::optional<Gender> gender;
  std::optional<std::string> state;
};

// One observation per ad of `theme` that carries demographic data: the
// matching audience share times the impressions midpoint (times the state's
// share when a state is given). This is the sample unit for the demographic
// t-tests.
std::vector<double> audience_samples(const Dataset& dataset, Theme theme,
                                     const AudienceFilter& filter);

}  // namespace adlens::corpus
