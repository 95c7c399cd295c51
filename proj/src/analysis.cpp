#include "adlens/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "adlens/error.hpp"

namespace adlens::analysis {
namespace {

using corpus::AgeBucket;

std::string describe(const Contrast& c) {
  const std::string theme(theme_name(c.theme));
  const std::string age(corpus::age_bucket_name(c.age));
  if (c.kind == ContrastKind::kFemaleVsMale) {
    return "female and male " + age + " audiences receive equal " + theme + " impressions";
  }
  return age + " audiences in " + c.state + " receive no " + theme + " impressions";
}

Contrast make(ContrastKind kind, Theme theme, AgeBucket age, std::string state = {}) {
  Contrast c{kind, theme, age, std::move(state), {}};
  c.null_hypothesis = describe(c);
  return c;
}

bool in_group(const corpus::AdRecord& r, const AssociationGroup& g) {
  if (g.entity_type && r.entity_type != *g.entity_type) return false;
  if (g.political_view && r.political_view != *g.political_view) return false;
  return true;
}

}  // namespace

std::vector<AssociationGroup> default_association_groups() {
  using corpus::EntityType;
  using corpus::PoliticalView;
  std::vector<AssociationGroup> out = {{"all", std::nullopt, std::nullopt}};
  for (EntityType t : {EntityType::kPublicHealth, EntityType::kCommercial, EntityType::kNonprofit,
                       EntityType::kPolitical}) {
    out.push_back({std::string(corpus::entity_type_name(t)), t, std::nullopt});
  }
  for (PoliticalView v : {PoliticalView::kLiberal, PoliticalView::kConservative}) {
    out.push_back({std::string(corpus::political_view_name(v)), std::nullopt, v});
  }
  return out;
}

AssociationResult theme_mf_association(const corpus::Dataset& dataset, const AssociationGroup& group) {
  AssociationResult out;
  out.group = group;
  std::map<std::size_t, std::map<std::size_t, std::int64_t>> cells;
  std::vector<bool> col_used(kMfClassCount, false);
  for (const auto& r : dataset.records) {
    const corpus::LabelPair* p = dataset.label_for(r.id);
    if (!p || p->theme == Theme::kUnassigned || !in_group(r, group)) continue;
    ++cells[index_of(p->theme)][index_of(p->mf)];
    col_used[index_of(p->mf)] = true;
  }
  std::vector<std::size_t> cols;
  for (std::size_t m = 0; m < kMfClassCount; ++m) {
    if (col_used[m]) {
      cols.push_back(m);
      out.cols.emplace_back(mf_name(mf_from_index(m)));
    }
  }
  for (const auto& [theme, row] : cells) {
    out.rows.emplace_back(theme_name(theme_from_index(theme)));
    std::vector<std::int64_t> counts;
    for (std::size_t m : cols) {
      const auto it = row.find(m);
      counts.push_back(it == row.end() ? 0 : it->second);
    }
    out.counts.push_back(std::move(counts));
  }
  if (out.rows.size() < 2 || out.cols.size() < 2) {
    out.note = "needs at least two themes and two foundations";
    return out;
  }
  try {
    out.test = stats::chi_square({out.counts, out.rows, out.cols});
  } catch (const Error& e) {
    out.note = e.what();
  }
  return out;
}

std::vector<Contrast> default_contrasts() {
  return {
      make(ContrastKind::kFemaleVsMale, Theme::kEncourageVaccination, AgeBucket::k25_34),
      make(ContrastKind::kFemaleVsMale, Theme::kVaccineMandate, AgeBucket::k65Plus),
      make(ContrastKind::kFemaleVsMale, Theme::kGovTrust, AgeBucket::k55_64),
      make(ContrastKind::kFemaleVsMale, Theme::kVaccineRollout, AgeBucket::k35_44),
      make(ContrastKind::kStateReach, Theme::kEncourageVaccination, AgeBucket::k25_34, "Wyoming"),
      make(ContrastKind::kStateReach, Theme::kVaccineMandate, AgeBucket::k65Plus, "Wyoming"),
      make(ContrastKind::kStateReach, Theme::kEncourageVaccination, AgeBucket::k25_34, "Massachusetts"),
      make(ContrastKind::kStateReach, Theme::kVaccineMandate, AgeBucket::k65Plus, "Massachusetts"),
  };
}

std::vector<ContrastResult> demographic_tests(const corpus::Dataset& dataset,
                                              std::span<const Contrast> contrasts) {
  std::vector<ContrastResult> out;
  for (const Contrast& c : contrasts) {
    ContrastResult r;
    r.contrast = c;
    try {
      if (c.kind == ContrastKind::kFemaleVsMale) {
        const auto female = corpus::audience_samples(dataset, c.theme, {c.age, corpus::Gender::kFemale, {}});
        const auto male = corpus::audience_samples(dataset, c.theme, {c.age, corpus::Gender::kMale, {}});
        r.n_a = female.size();
        r.n_b = male.size();
        r.test = stats::two_sample_t(female, male, false);
      } else {
        const auto reach = corpus::audience_samples(dataset, c.theme, {c.age, std::nullopt, c.state});
        r.n_a = reach.size();
        r.test = stats::one_sample_t(reach, 0.0);
      }
    } catch (const Error& e) {
      r.note = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::size_t default_adf_max_lag(std::size_t n) {
  const auto bound = static_cast<std::size_t>(std::ceil(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
  const std::size_t cap = n / 2 >= 2 ? n / 2 - 2 : 0;
  return std::min({bound, cap, n >= 10 ? n - 10 : 0});
}

CausalityResult causality(const corpus::Dataset& dataset, const corpus::TimeSeries& deaths,
                          std::span<const Theme> themes, std::size_t max_lag) {
  if (max_lag == 0) throw Error(ErrorCode::kInvalidArgument, "max lag must be >= 1");
  if (deaths.size() == 0) throw Error(ErrorCode::kInvalidArgument, "deaths series is empty");
  CausalityResult out;
  out.themes.assign(themes.begin(), themes.end());
  bool any = false;
  for (const auto& r : dataset.records) {
    if (!themes.empty()) {
      const corpus::LabelPair* p = dataset.label_for(r.id);
      if (!p || std::find(themes.begin(), themes.end(), p->theme) == themes.end()) continue;
    }
    if (!any || r.start_date < out.start) out.start = r.start_date;
    if (!any || r.start_date > out.end) out.end = r.start_date;
    any = true;
  }
  if (!any) throw Error(ErrorCode::kInvalidArgument, "no ads for the selected themes");
  if (deaths.dates.front() > out.start || deaths.dates.back() < out.end) {
    throw Error(ErrorCode::kInvalidArgument,
                "date misalignment: deaths cover " + format_date(deaths.dates.front()) + ".." +
                    format_date(deaths.dates.back()) + " but ads span " + format_date(out.start) +
                    ".." + format_date(out.end));
  }
  const corpus::TimeSeries ads = corpus::build_time_series(dataset, themes, out.start, out.end);
  corpus::TimeSeries window;
  window.name = deaths.name;
  const auto first = static_cast<std::size_t>((out.start - deaths.dates.front()).count());
  for (std::size_t i = 0; i < ads.size(); ++i) {
    window.dates.push_back(deaths.dates[first + i]);
    window.values.push_back(deaths.values[first + i]);
  }

  for (const corpus::TimeSeries* s : {static_cast<const corpus::TimeSeries*>(&window), &ads}) {
    StationarityResult st;
    st.series = s->name;
    try {
      st.adf = stats::adf(s->values, default_adf_max_lag(s->size()), stats::LagSelect::kAic);
    } catch (const Error& e) {
      st.note = e.what();
    }
    out.stationarity.push_back(std::move(st));
  }
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    if (ads.size() < 3 * lag + 10) {
      out.skipped_lags.push_back(lag);
      continue;
    }
    out.rows.push_back({lag, stats::granger(window, ads, lag), stats::granger(ads, window, lag)});
  }
  return out;
}

}  // namespace adlens::analysis
