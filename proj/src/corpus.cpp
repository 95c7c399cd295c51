#include "adlens/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "adlens/rng.hpp"
#include "adlens/text.hpp"

namespace adlens::corpus {
namespace {

constexpr std::array<std::string_view, 5> kEntityNames = {"PublicHealth", "Commercial", "Nonprofit",
                                                          "Political", "Unknown"};
constexpr std::array<std::string_view, 3> kViewNames = {"Liberal", "Conservative", "Unknown"};
constexpr std::array<std::string_view, 7> kAgeNames = {"18-24", "25-34", "35-44", "45-54",
                                                       "55-64", "65+",   "unknown"};
constexpr std::array<std::string_view, 3> kGenderNames = {"male", "female", "unknown"};

std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-') {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

template <class Enum, std::size_t N>
Enum parse_named(std::string_view s, const std::array<std::string_view, N>& names, Enum fallback) {
  const std::string key = squash(s);
  for (std::size_t i = 0; i < N; ++i) {
    if (squash(names[i]) == key) return static_cast<Enum>(i);
  }
  return fallback;
}

void check_shares(double total, std::size_t count, std::string_view what, const AdRecord& r) {
  if (count == 0) return;
  if (std::abs(total - 1.0) > kShareTolerance) {
    throw Error(ErrorCode::kInvalidArgument,
                "ad \"" + r.id + "\": " + std::string(what) + " shares sum to " +
                    std::to_string(total) + ", expected 1 +/- 0.02");
  }
}

double measure_of(const AdRecord& r, Measure m) {
  switch (m) {
    case Measure::kCount:
      return 1.0;
    case Measure::kSpendMid:
      return r.spend.midpoint();
    case Measure::kImpressionsMid:
      return r.impressions.midpoint();
  }
  return 0.0;
}

// Groups an ad contributes to, each with a weight on the ad's measure.
std::vector<std::pair<std::string, double>> groups_of(const Dataset& d, const AdRecord& r,
                                                      GroupBy g) {
  switch (g) {
    case GroupBy::kTheme:
    case GroupBy::kMf: {
      const LabelPair* p = d.label_for(r.id);
      if (!p) return {{std::string(kUnlabeledBucket), 1.0}};
      const auto name = g == GroupBy::kTheme ? theme_name(p->theme) : mf_name(p->mf);
      return {{std::string(name), 1.0}};
    }
    case GroupBy::kEntityType:
      return {{std::string(entity_type_name(r.entity_type)), 1.0}};
    case GroupBy::kFundingEntity:
      return {{r.funding_entity, 1.0}};
    case GroupBy::kPoliticalView:
      return {{std::string(political_view_name(r.political_view)), 1.0}};
    case GroupBy::kAgeGender: {
      std::vector<std::pair<std::string, double>> out;
      for (const DemographicShare& s : r.demographics) {
        out.emplace_back(std::string(age_bucket_name(s.age)) + "/" +
                             std::string(gender_name(s.gender)),
                         s.share);
      }
      return out;
    }
  }
  return {};
}

}  // namespace

std::string_view entity_type_name(EntityType t) { return kEntityNames.at(static_cast<std::size_t>(t)); }
std::string_view political_view_name(PoliticalView v) { return kViewNames.at(static_cast<std::size_t>(v)); }
std::string_view age_bucket_name(AgeBucket a) { return kAgeNames.at(static_cast<std::size_t>(a)); }
std::string_view gender_name(Gender g) { return kGenderNames.at(static_cast<std::size_t>(g)); }

EntityType parse_entity_type(std::string_view s) {
  return parse_named(s, kEntityNames, EntityType::kUnknown);
}
PoliticalView parse_political_view(std::string_view s) {
  return parse_named(s, kViewNames, PoliticalView::kUnknown);
}
AgeBucket parse_age_bucket(std::string_view s) {
  return parse_named(s, kAgeNames, AgeBucket::kUnknown);
}
Gender parse_gender(std::string_view s) { return parse_named(s, kGenderNames, Gender::kUnknown); }

std::string_view group_by_name(GroupBy g) {
  switch (g) {
    case GroupBy::kTheme: return "theme";
    case GroupBy::kMf: return "mf";
    case GroupBy::kEntityType: return "entity_type";
    case GroupBy::kFundingEntity: return "funding_entity";
    case GroupBy::kAgeGender: return "age_gender";
    case GroupBy::kPoliticalView: return "political_view";
  }
  return "";
}

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::kCount: return "count";
    case Measure::kSpendMid: return "spend_mid";
    case Measure::kImpressionsMid: return "impressions_mid";
  }
  return "";
}

const LabelPair* Dataset::label_for(std::string_view ad_id) const {
  auto it = labels.find(std::string(ad_id));
  return it == labels.end() ? nullptr : &it->second;
}

void validate_record(const AdRecord& r) {
  if (r.id.empty()) throw Error(ErrorCode::kInvalidArgument, "ad id must be non-empty");
  for (const auto* range : {&r.spend, &r.impressions}) {
    if (!std::isfinite(range->lower) || !std::isfinite(range->upper) || range->lower < 0.0 ||
        range->lower > range->upper) {
      throw Error(ErrorCode::kInvalidArgument,
                  "ad \"" + r.id + "\": " + (range == &r.spend ? "spend" : "impressions") +
                      " range must satisfy 0 <= lower <= upper");
    }
  }
  double demo_total = 0.0;
  for (const auto& s : r.demographics) {
    if (!(s.share >= 0.0 && s.share <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "ad \"" + r.id + "\": demographic share outside [0,1]");
    }
    demo_total += s.share;
  }
  check_shares(demo_total, r.demographics.size(), "demographic", r);
  double region_total = 0.0;
  for (const auto& s : r.regions) {
    if (!(s.share >= 0.0 && s.share <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "ad \"" + r.id + "\": region share outside [0,1]");
    }
    region_total += s.share;
  }
  check_shares(region_total, r.regions.size(), "region", r);
}

Dataset dedup_by_content(const Dataset& dataset) {
  Dataset out;
  std::unordered_set<std::string> seen;
  for (const AdRecord& r : dataset.records) {
    if (!seen.insert(text::normalize_content(r.body)).second) continue;
    if (const LabelPair* p = dataset.label_for(r.id)) out.labels.emplace(r.id, *p);
    out.records.push_back(r);
  }
  return out;
}

SplitSizes split_sizes(std::size_t n, const SplitRatios& ratios) {
  if (!(ratios.train > 0.0 && ratios.val > 0.0 && ratios.test > 0.0) ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "split ratios must be positive and sum to 1");
  }
  SplitSizes s;
  // The epsilon keeps 0.6 * 10 from flooring to 5 through representation error.
  s.train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.train + 1e-9));
  s.val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratios.val + 1e-9));
  s.train = std::min(s.train, n);
  s.val = std::min(s.val, n - s.train);
  s.test = n - s.train - s.val;
  return s;
}

IndexSplit split_indices(std::size_t n, const SplitRatios& ratios, std::uint64_t seed) {
  const SplitSizes sizes = split_sizes(n, ratios);
  const std::vector<std::size_t> order = shuffled_indices(n, seed);
  IndexSplit out;
  out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(sizes.train));
  out.val.assign(order.begin() + static_cast<std::ptrdiff_t>(sizes.train),
                 order.begin() + static_cast<std::ptrdiff_t>(sizes.train + sizes.val));
  out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(sizes.train + sizes.val), order.end());
  return out;
}

Dataset select(const Dataset& dataset, std::span<const std::size_t> indices) {
  Dataset out;
  out.records.reserve(indices.size());
  for (std::size_t i : indices) {
    const AdRecord& r = dataset.records.at(i);
    if (const LabelPair* p = dataset.label_for(r.id)) out.labels.emplace(r.id, *p);
    out.records.push_back(r);
  }
  return out;
}

DatasetSplit split(const Dataset& dataset, const SplitRatios& ratios, std::uint64_t seed) {
  if (dataset.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot split an empty dataset");
  const IndexSplit idx = split_indices(dataset.size(), ratios, seed);
  return {select(dataset, idx.train), select(dataset, idx.val), select(dataset, idx.test)};
}

std::vector<GroupValue> aggregate(const Dataset& dataset, GroupBy group_by, Measure measure) {
  std::map<std::string, double> totals;
  for (const AdRecord& r : dataset.records) {
    const double m = measure_of(r, measure);
    for (const auto& [group, weight] : groups_of(dataset, r, group_by)) {
      totals[group] += weight * m;
    }
  }
  std::vector<GroupValue> out;
  out.reserve(totals.size());
  for (auto& [group, value] : totals) out.push_back({group, value});
  std::stable_sort(out.begin(), out.end(), [](const GroupValue& a, const GroupValue& b) {
    return a.value > b.value;
  });
  return out;
}

CrossTab crosstab(const Dataset& dataset, GroupBy rows, GroupBy cols, Measure measure) {
  std::map<std::string, std::map<std::string, double>> cells;
  std::set<std::string> col_keys;
  for (const AdRecord& r : dataset.records) {
    const double m = measure_of(r, measure);
    const auto row_groups = groups_of(dataset, r, rows);
    const auto col_groups = groups_of(dataset, r, cols);
    for (const auto& [rk, rw] : row_groups) {
      for (const auto& [ck, cw] : col_groups) {
        cells[rk][ck] += rw * cw * m;
        col_keys.insert(ck);
      }
    }
  }
  CrossTab out;
  out.cols.assign(col_keys.begin(), col_keys.end());
  for (const auto& [rk, row] : cells) {
    out.rows.push_back(rk);
    std::vector<double> values;
    values.reserve(out.cols.size());
    for (const auto& ck : out.cols) {
      auto it = row.find(ck);
      values.push_back(it == row.end() ? 0.0 : it->second);
    }
    out.values.push_back(std::move(values));
  }
  return out;
}

std::vector<TermCount> term_frequency(const Dataset& dataset, Theme theme, std::size_t top_k) {
  const auto& stop = text::english_stopwords();
  std::unordered_map<std::string, std::size_t> counts;
  for (const AdRecord& r : dataset.records) {
    const LabelPair* p = dataset.label_for(r.id);
    if (!p || p->theme != theme) continue;
    for (auto& token : text::alpha_tokens(r.body)) {
      if (!stop.count(token)) ++counts[std::move(token)];
    }
  }
  std::vector<TermCount> out;
  out.reserve(counts.size());
  for (auto& [term, count] : counts) out.push_back({term, count});
  std::sort(out.begin(), out.end(), [](const TermCount& a, const TermCount& b) {
    return a.count != b.count ? a.count > b.count : a.term < b.term;
  });
  if (out.size() > top_k) out.resize(top_k);
  return out;
}

TimeSeries build_time_series(const Dataset& dataset, std::span<const Theme> themes, Date start,
                             Date end, std::string name) {
  if (end < start) throw Error(ErrorCode::kInvalidArgument, "time series end precedes start");
  TimeSeries ts;
  ts.name = std::move(name);
  const auto days = static_cast<std::size_t>((end - start).count()) + 1;
  ts.dates.reserve(days);
  for (std::size_t i = 0; i < days; ++i) ts.dates.push_back(start + std::chrono::days{i});
  ts.values.assign(days, 0.0);
  for (const AdRecord& r : dataset.records) {
    if (!themes.empty()) {
      const LabelPair* p = dataset.label_for(r.id);
      if (!p || std::find(themes.begin(), themes.end(), p->theme) == themes.end()) continue;
    }
    if (r.start_date < start || r.start_date > end) continue;
    ts.values[static_cast<std::size_t>((r.start_date - start).count())] += r.impressions.midpoint();
  }
  return ts;
}

std::vector<double> audience_samples(const Dataset& dataset, Theme theme,
                                     const AudienceFilter& filter) {
  std::vector<double> out;
  for (const AdRecord& r : dataset.records) {
    const LabelPair* p = dataset.label_for(r.id);
    if (!p || p->theme != theme || r.demographics.empty()) continue;
    double share = 0.0;
    for (const DemographicShare& s : r.demographics) {
      if (filter.age && s.age != *filter.age) continue;
      if (filter.gender && s.gender != *filter.gender) continue;
      share += s.share;
    }
    if (filter.state) {
      double state_share = 0.0;
      for (const RegionShare& s : r.regions) {
        if (s.state == *filter.state) state_share += s.share;
      }
      share *= state_share;
    }
    out.push_back(share * r.impressions.midpoint());
  }
  return out;
}

}  // namespace adlens::corpus
