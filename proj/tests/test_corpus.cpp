#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "adlens/corpus.hpp"
#include "adlens/error.hpp"
#include "adlens/text.hpp"
#include "test_util.hpp"

using namespace adlens;
using namespace adlens::corpus;
using testutil::ad;
using testutil::label;

namespace {

const char* kThreeAds =
    R"({"id":"a1","body":"Get vaccinated today","funding_entity":"Health Dept","entity_type":"PublicHealth","political_view":"Liberal","spend":{"lower":100,"upper":199},"impressions":{"lower":1000,"upper":1999},"start_date":"2021-03-01","demographics":[{"age":"25-34","gender":"female","share":0.6},{"age":"25-34","gender":"male","share":0.4}],"regions":[{"state":"Ohio","share":1.0}]}
{"id":"a2","body":"Mandates are tyranny","funding_entity":"PAC","entity_type":"Political","spend":{"lower":0,"upper":99},"impressions":{"lower":"5000","upper":"5999"},"start_date":"2021-03-03"}
{"id":"a3","body":"Clinic hours","entity_type":"Mystery","start_date":"2021-03-02"}
)";

Dataset parse(const std::string& s) {
  std::istringstream in(s);
  return parse_ads_jsonl(in);
}

std::string error_of(const std::string& s) {
  try {
    parse(s);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("three-row JSONL loads three records with defaults for missing fields") {
  const Dataset d = parse(kThreeAds);
  REQUIRE(d.size() == 3);
  CHECK(d.records[0].demographics.size() == 2);
  CHECK(d.records[0].entity_type == EntityType::kPublicHealth);
  CHECK(d.records[1].impressions.lower == 5000.0);
  CHECK(d.records[1].political_view == PoliticalView::kUnknown);
  CHECK(d.records[2].entity_type == EntityType::kUnknown);
  CHECK(d.records[2].demographics.empty());
  CHECK(format_date(d.records[2].start_date) == "2021-03-02");
}

TEST_CASE("ingestion errors name the offending line") {
  const std::string missing_body = std::string(R"({"id":"x","body":"ok","start_date":"2021-03-01"})") +
                                   "\n" + R"({"id":"y","start_date":"2021-03-01"})" + "\n";
  const auto msg = error_of(missing_body);
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("body") != std::string::npos);

  const auto half = error_of(
      R"({"id":"x","body":"b","start_date":"2021-03-01","demographics":[{"age":"18-24","gender":"male","share":0.25},{"age":"18-24","gender":"female","share":0.25}]})");
  CHECK(half.find("line 1") != std::string::npos);
  CHECK(half.find("sum") != std::string::npos);

  const auto dup = error_of(std::string(R"({"id":"x","body":"b","start_date":"2021-03-01"})") + "\n" +
                            R"({"id":"x","body":"c","start_date":"2021-03-01"})");
  CHECK(dup.find("duplicate") != std::string::npos);

  CHECK_THROWS_AS(load_ads("/nonexistent/ads.jsonl", AdFormat::kJsonl), Error);
}

TEST_CASE("share invariant holds within tolerance") {
  AdRecord r = ad("x", "b");
  r.demographics = {{AgeBucket::k18_24, Gender::kMale, 0.51}, {AgeBucket::k18_24, Gender::kFemale, 0.505}};
  CHECK_NOTHROW(validate_record(r));
  r.demographics[1].share = 0.53;
  CHECK_THROWS_AS(validate_record(r), Error);
  r = ad("x", "b", 10, 5);
  CHECK_THROWS_AS(validate_record(r), Error);
}

TEST_CASE("CSV ingestion parses demographics and regions") {
  std::istringstream in(
      "id,body,funding_entity,entity_type,political_view,spend_lower,spend_upper,impressions_lower,"
      "impressions_upper,start_date,demographics,regions\n"
      "c1,\"Hello, world\",Org,Nonprofit,Conservative,1,2,3,4,2021-05-05,25-34:female:0.5;25-34:male:0.5,"
      "Texas:1\n");
  const Dataset d = parse_ads_csv(in);
  REQUIRE(d.size() == 1);
  CHECK(d.records[0].body == "Hello, world");
  CHECK(d.records[0].demographics.size() == 2);
  CHECK(d.records[0].regions[0].state == "Texas");
  CHECK(d.records[0].political_view == PoliticalView::kConservative);
}

TEST_CASE("JSONL round trip preserves the digest") {
  const Dataset d = parse(kThreeAds);
  std::ostringstream out;
  write_ads_jsonl(out, d);
  const Dataset back = parse(out.str());
  CHECK(dataset_digest(back) == dataset_digest(d));
}

TEST_CASE("dedup keeps first occurrences and agrees with a pairwise oracle") {
  Dataset d;
  d.records = {ad("1", "Get the shot"), ad("2", "get  the SHOT"), ad("3", "Stay home"),
               ad("4", "stay home "), ad("5", "Vote")};
  d.labels["2"] = label("2", Theme::kVote, MoralFoundation::kNone);
  const Dataset out = dedup_by_content(d);
  // O(n^2) oracle: keep i unless some j < i has an equal normalized body.
  std::vector<std::string> expected;
  for (std::size_t i = 0; i < d.size(); ++i) {
    bool dup = false;
    for (std::size_t j = 0; j < i; ++j) {
      dup = dup || text::normalize_content(d.records[i].body) == text::normalize_content(d.records[j].body);
    }
    if (!dup) expected.push_back(d.records[i].id);
  }
  std::vector<std::string> got;
  for (const auto& r : out.records) got.push_back(r.id);
  CHECK(got == expected);
  CHECK(got.size() == 3);
  CHECK(out.labels.empty());
}

TEST_CASE("split sizes follow floor/floor/remainder") {
  const auto s = split_sizes(557, {});
  CHECK(s.train == 334);
  CHECK(s.val == 111);
  CHECK(s.test == 112);
  CHECK_THROWS_AS(split(Dataset{}, {}, 1), Error);
  CHECK_THROWS_AS(split_sizes(10, {0.5, 0.2, 0.2}), Error);
}

TEST_CASE("split is deterministic and a partition") {
  Dataset d;
  for (int i = 0; i < 10; ++i) d.records.push_back(ad("id" + std::to_string(i), "b" + std::to_string(i)));
  const auto a = split(d, {}, 42);
  const auto b = split(d, {}, 42);
  std::set<std::string> ids;
  std::size_t total = 0;
  for (const Dataset* part : {&a.train, &a.val, &a.test}) {
    for (const auto& r : part->records) ids.insert(r.id);
    total += part->size();
  }
  CHECK(total == 10);
  CHECK(ids.size() == 10);
  CHECK(dataset_digest(a.test) == dataset_digest(b.test));
  CHECK(dataset_digest(a.train) == dataset_digest(b.train));
}

TEST_CASE("cohen kappa anchors") {
  const std::vector<int> a = {1, 2, 1, 2};
  CHECK(cohen_kappa(a, a) == doctest::Approx(1.0));
  const std::vector<char> x = {'x', 'y'};
  const std::vector<char> y = {'y', 'x'};
  CHECK(cohen_kappa(x, y) == doctest::Approx(-1.0));
  const std::vector<int> c = {3, 3, 3};
  CHECK_THROWS_AS(cohen_kappa(c, c), Error);
  const std::vector<int> short_one = {1};
  CHECK_THROWS_AS(cohen_kappa(a, short_one), Error);
}

TEST_CASE("aggregate sums midpoints per theme") {
  Dataset d;
  d.records = {ad("a", "x", 0, 100, 1000, 2000), ad("b", "y", 100, 200, 0, 0), ad("c", "z", 10, 30, 500, 500),
               ad("d", "w", 1, 1, 1, 1)};
  d.labels["a"] = label("a", Theme::kVote, MoralFoundation::kCare);
  d.labels["b"] = label("b", Theme::kVote, MoralFoundation::kNone);
  d.labels["c"] = label("c", Theme::kGovTrust, MoralFoundation::kCare);
  const auto spend = aggregate(d, GroupBy::kTheme, Measure::kSpendMid);
  REQUIRE(spend.size() == 3);
  CHECK(spend[0].group == "Vote");
  CHECK(spend[0].value == doctest::Approx(50.0 + 150.0));
  CHECK(spend[1].group == "GovTrust");
  CHECK(spend[1].value == doctest::Approx(20.0));
  CHECK(spend[2].group == std::string(kUnlabeledBucket));
  const auto count = aggregate(d, GroupBy::kMf, Measure::kCount);
  CHECK(count[0].group == "CareHarm");
  CHECK(count[0].value == 2.0);
  CHECK(aggregate(Dataset{}, GroupBy::kTheme, Measure::kCount).empty());
}

TEST_CASE("single ad aggregates to its own measure under every key") {
  Dataset d;
  d.records = {ad("a", "x", 10, 20, 100, 300)};
  d.records[0].demographics = {{AgeBucket::k18_24, Gender::kMale, 1.0}};
  d.labels["a"] = label("a", Theme::kVote, MoralFoundation::kCare);
  for (GroupBy g : {GroupBy::kTheme, GroupBy::kMf, GroupBy::kEntityType, GroupBy::kFundingEntity,
                    GroupBy::kAgeGender, GroupBy::kPoliticalView}) {
    const auto rows = aggregate(d, g, Measure::kImpressionsMid);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].value == doctest::Approx(200.0));
  }
}

TEST_CASE("age/gender aggregation weights by audience share") {
  Dataset d;
  d.records = {ad("a", "x", 0, 0, 1000, 1000)};
  d.records[0].demographics = {{AgeBucket::k25_34, Gender::kFemale, 0.75},
                               {AgeBucket::k25_34, Gender::kMale, 0.25}};
  const auto rows = aggregate(d, GroupBy::kAgeGender, Measure::kImpressionsMid);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].group == "25-34/female");
  CHECK(rows[0].value == doctest::Approx(750.0));
}

TEST_CASE("crosstab totals match aggregate") {
  Dataset d;
  d.records = {ad("a", "x", 0, 10), ad("b", "y", 0, 20), ad("c", "z", 0, 40)};
  d.records[0].entity_type = EntityType::kPolitical;
  d.records[1].entity_type = EntityType::kCommercial;
  d.records[2].entity_type = EntityType::kPolitical;
  d.labels["a"] = label("a", Theme::kVote, MoralFoundation::kCare);
  d.labels["b"] = label("b", Theme::kVote, MoralFoundation::kCare);
  d.labels["c"] = label("c", Theme::kGovTrust, MoralFoundation::kCare);
  const auto t = crosstab(d, GroupBy::kEntityType, GroupBy::kTheme, Measure::kSpendMid);
  CHECK(t.rows == std::vector<std::string>{"Commercial", "Political"});
  CHECK(t.cols == std::vector<std::string>{"GovTrust", "Vote"});
  CHECK(t.values[1][0] == doctest::Approx(20.0));
  CHECK(t.values[1][1] == doctest::Approx(5.0));
  CHECK(t.values[0][1] == doctest::Approx(10.0));
}

TEST_CASE("term frequency ranks non-stopwords of one theme") {
  Dataset d;
  d.records = {ad("a", "vote early vote often"), ad("b", "the vote matters"), ad("c", "vaccine vaccine")};
  d.labels["a"] = label("a", Theme::kVote, MoralFoundation::kNone);
  d.labels["b"] = label("b", Theme::kVote, MoralFoundation::kNone);
  d.labels["c"] = label("c", Theme::kGovTrust, MoralFoundation::kNone);
  const auto top = term_frequency(d, Theme::kVote, 10);
  REQUIRE(top.size() == 4);
  CHECK(top[0].term == "vote");
  CHECK(top[0].count == 3);
  CHECK(top[1].term == "early");
  CHECK(term_frequency(d, Theme::kVote, 1).size() == 1);
  CHECK(term_frequency(d, Theme::kVaccineStatus, 5).empty());
}

TEST_CASE("daily series fill gaps with zero") {
  Dataset d;
  d.records = {ad("a", "x", 0, 0, 100, 100, "2021-03-01"), ad("b", "y", 0, 0, 50, 150, "2021-03-03"),
               ad("c", "z", 0, 0, 7, 7, "2021-03-03")};
  d.labels["a"] = label("a", Theme::kVote, MoralFoundation::kNone);
  d.labels["b"] = label("b", Theme::kVote, MoralFoundation::kNone);
  d.labels["c"] = label("c", Theme::kGovTrust, MoralFoundation::kNone);
  const std::vector<Theme> vote = {Theme::kVote};
  const auto ts = build_time_series(d, vote, parse_date("2021-03-01"), parse_date("2021-03-04"));
  CHECK(ts.values == std::vector<double>{100.0, 0.0, 100.0, 0.0});
  const auto all = build_time_series(d, {}, parse_date("2021-03-01"), parse_date("2021-03-04"));
  CHECK(all.values == std::vector<double>{100.0, 0.0, 107.0, 0.0});
}

TEST_CASE("deaths CSV requires every day") {
  std::istringstream ok("date,new_deaths\n2021-03-01,5\n2021-03-02,6\n");
  const auto ts = parse_deaths_csv(ok);
  CHECK(ts.values == std::vector<double>{5.0, 6.0});
  std::istringstream gap("date,new_deaths\n2021-03-01,5\n2021-03-03,6\n");
  CHECK_THROWS_AS(parse_deaths_csv(gap), Error);
  std::ostringstream out;
  write_deaths_csv(out, ts);
  std::istringstream back(out.str());
  CHECK(parse_deaths_csv(back).values == ts.values);
}

TEST_CASE("labels attach by id and later labels win") {
  Dataset d = parse(kThreeAds);
  std::istringstream in(
      R"({"ad_id":"a1","theme":"Vote","mf":"Care"})"
      "\n"
      R"({"ad_id":"a1","theme":"GovTrust","mf":"None","source":"weak"})");
  const auto labels = parse_labels_jsonl(in, LabelSource::kGold);
  attach_labels(d, labels);
  REQUIRE(d.label_for("a1"));
  CHECK(d.label_for("a1")->theme == Theme::kGovTrust);
  CHECK(d.label_for("a1")->source == LabelSource::kWeak);
  const std::vector<LabelPair> bad = {label("zz", Theme::kVote, MoralFoundation::kNone)};
  CHECK_THROWS_AS(attach_labels(d, bad), Error);
}

TEST_CASE("audience samples multiply share by impressions") {
  Dataset d;
  d.records = {ad("a", "x", 0, 0, 1000, 1000)};
  d.records[0].demographics = {{AgeBucket::k25_34, Gender::kFemale, 0.6}, {AgeBucket::k25_34, Gender::kMale, 0.4}};
  d.records[0].regions = {{"Ohio", 0.5}, {"Texas", 0.5}};
  d.labels["a"] = label("a", Theme::kVote, MoralFoundation::kNone);
  const auto f = audience_samples(d, Theme::kVote, {AgeBucket::k25_34, Gender::kFemale, {}});
  REQUIRE(f.size() == 1);
  CHECK(f[0] == doctest::Approx(600.0));
  const auto s = audience_samples(d, Theme::kVote, {AgeBucket::k25_34, std::nullopt, std::string("Ohio")});
  CHECK(s[0] == doctest::Approx(500.0));
}
