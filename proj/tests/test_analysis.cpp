#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "adlens/analysis.hpp"
#include "adlens/error.hpp"
#include "adlens/synth.hpp"
#include "test_util.hpp"

using namespace adlens;
using namespace adlens::analysis;

namespace {

corpus::Dataset labeled(std::initializer_list<std::tuple<Theme, MoralFoundation, corpus::EntityType>> rows) {
  corpus::Dataset d;
  int i = 0;
  for (const auto& [theme, mf, entity] : rows) {
    const std::string id = "a" + std::to_string(i++);
    auto r = testutil::ad(id, "body " + id, 10, 20, 100, 200, "2021-01-01");
    r.entity_type = entity;
    d.records.push_back(r);
    d.labels[id] = testutil::label(id, theme, mf, LabelSource::kGold);
  }
  return d;
}

}  // namespace

TEST_CASE("default association groups") {
  const auto g = default_association_groups();
  REQUIRE(g.size() == 7);
  CHECK(g[0].name == "all");
  CHECK_FALSE(g[0].entity_type);
  CHECK(g[1].entity_type == corpus::EntityType::kPublicHealth);
  CHECK(g[6].political_view == corpus::PoliticalView::kConservative);
}

TEST_CASE("association table drops Unassigned, empty rows and columns") {
  using E = corpus::EntityType;
  corpus::Dataset d;
  int i = 0;
  auto add = [&](Theme t, MoralFoundation m, E e, int times) {
    for (int k = 0; k < times; ++k) {
      const std::string id = "a" + std::to_string(i++);
      auto r = testutil::ad(id, "b" + id, 1, 2, 10, 20, "2021-01-01");
      r.entity_type = e;
      d.records.push_back(r);
      d.labels[id] = testutil::label(id, t, m, LabelSource::kGold);
    }
  };
  add(Theme::kVaccineMandate, MoralFoundation::kLiberty, E::kPolitical, 20);
  add(Theme::kVaccineMandate, MoralFoundation::kCare, E::kPolitical, 5);
  add(Theme::kEncourageVaccination, MoralFoundation::kCare, E::kPublicHealth, 20);
  add(Theme::kEncourageVaccination, MoralFoundation::kLiberty, E::kPublicHealth, 5);
  add(Theme::kUnassigned, MoralFoundation::kSanctity, E::kPublicHealth, 9);

  const auto all = theme_mf_association(d, default_association_groups()[0]);
  CHECK(all.rows.size() == 2);
  CHECK(all.cols.size() == 2);
  CHECK(std::find(all.cols.begin(), all.cols.end(), "Sanctity") == all.cols.end());
  REQUIRE(all.test);
  const auto direct = stats::chi_square({all.counts, {}, {}});
  CHECK(all.test->statistic == doctest::Approx(direct.statistic));
  CHECK(all.test->p_value < 0.01);

  const auto political = theme_mf_association(d, default_association_groups()[4]);
  CHECK(political.rows.size() == 1);
  CHECK_FALSE(political.test);
  CHECK_FALSE(political.note.empty());
}

TEST_CASE("association reports a note instead of throwing on sparse tables") {
  using E = corpus::EntityType;
  const auto d = labeled({{Theme::kVaccineMandate, MoralFoundation::kLiberty, E::kPolitical},
                          {Theme::kEncourageVaccination, MoralFoundation::kCare, E::kPolitical}});
  const auto r = theme_mf_association(d, default_association_groups()[0]);
  CHECK_FALSE(r.test);
  CHECK(r.note.find("expected") != std::string::npos);
}

TEST_CASE("default contrasts describe their null hypotheses") {
  const auto c = default_contrasts();
  REQUIRE(c.size() == 8);
  for (const auto& x : c) CHECK_FALSE(x.null_hypothesis.empty());
  CHECK(c[0].kind == ContrastKind::kFemaleVsMale);
  CHECK(c[4].kind == ContrastKind::kStateReach);
  CHECK(c[4].state == "Wyoming");
}

TEST_CASE("demographic tests match direct t tests on audience samples") {
  const auto f = synth::make_fixture({});
  corpus::Dataset d = f.ads;
  corpus::attach_labels(d, f.truth);
  const auto results = demographic_tests(d, default_contrasts());
  REQUIRE(results.size() == 8);
  for (const auto& r : results) {
    if (r.contrast.kind == ContrastKind::kFemaleVsMale) {
      const auto fem = corpus::audience_samples(d, r.contrast.theme,
                                                {r.contrast.age, corpus::Gender::kFemale, {}});
      const auto mal = corpus::audience_samples(d, r.contrast.theme,
                                                {r.contrast.age, corpus::Gender::kMale, {}});
      CHECK(r.n_a == fem.size());
      CHECK(r.n_b == mal.size());
      if (r.test) {
        CHECK(r.test->statistic == doctest::Approx(stats::two_sample_t(fem, mal, false).statistic));
      } else {
        CHECK_FALSE(r.note.empty());
      }
    } else {
      CHECK(r.n_b == 0);
      CHECK((r.test.has_value() || !r.note.empty()));
    }
  }
}

TEST_CASE("default ADF lag bound") {
  CHECK(default_adf_max_lag(100) == 12);
  CHECK(default_adf_max_lag(500) == 18);
  CHECK(default_adf_max_lag(50) == 11);
  CHECK(default_adf_max_lag(20) == 8);
  CHECK(default_adf_max_lag(12) == 2);
  CHECK(default_adf_max_lag(5) == 0);
}

TEST_CASE("causality recovers the fixture's planted lag") {
  const auto f = synth::make_fixture({});
  const auto r = causality(f.ads, f.deaths, {}, 5);
  CHECK(r.start == parse_date("2021-03-01"));
  CHECK(r.end == parse_date("2021-04-19"));
  REQUIRE(r.stationarity.size() == 2);
  REQUIRE(r.rows.size() == 5);
  for (const auto& row : r.rows) {
    CHECK(row.deaths_to_ads.dof == static_cast<double>(row.lag));
    if (row.lag == 3) {
      CHECK(row.deaths_to_ads.p_value < 0.01);
    } else if (row.lag < 3) {
      CHECK(row.deaths_to_ads.p_value > 0.01);
    }
  }
  CHECK(r.rows[2].ads_to_deaths.p_value > 0.05);
}

TEST_CASE("causality skips lags without enough observations") {
  const auto f = synth::make_fixture({});
  const auto r = causality(f.ads, f.deaths, {}, 14);
  // 50 days support lags up to 13.
  CHECK(r.rows.size() == 13);
  REQUIRE(r.skipped_lags.size() == 1);
  CHECK(r.skipped_lags[0] == 14);
}

TEST_CASE("causality input errors") {
  const auto f = synth::make_fixture({});
  CHECK_THROWS_AS(causality(f.ads, f.deaths, {}, 0), Error);
  corpus::TimeSeries short_deaths = f.deaths;
  short_deaths.dates.erase(short_deaths.dates.begin());
  short_deaths.values.erase(short_deaths.values.begin());
  try {
    causality(f.ads, short_deaths, {}, 2);
    FAIL("expected misalignment");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
    CHECK(std::string(e.what()).find("misalignment") != std::string::npos);
  }
  const Theme only[] = {Theme::kGovTrust};
  CHECK_THROWS_AS(causality(f.ads, f.deaths, only, 2), Error);  // no labels attached
}

TEST_CASE("causality restricted to themes uses only those ads") {
  const auto f = synth::make_fixture({});
  corpus::Dataset d = f.ads;
  corpus::attach_labels(d, f.truth);
  const Theme only[] = {f.truth[0].theme};
  const auto r = causality(d, f.deaths, only, 1);
  CHECK(r.start == parse_date("2021-03-01"));
  REQUIRE(r.themes.size() == 1);
  CHECK(r.themes[0] == f.truth[0].theme);
}
