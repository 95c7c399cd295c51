#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "adlens/config.hpp"
#include "adlens/error.hpp"
#include "adlens/report.hpp"
#include "adlens/synth.hpp"
#include "test_util.hpp"

using namespace adlens;
using report::Json;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an adlens::Error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

// ---- config -----------------------------------------------------------------

TEST_CASE("config stream sets model and strategy fields") {
  config::Settings s;
  std::istringstream in(
      "# comment\n"
      "[model]\n"
      "seq_len = 24\n"
      "embed_dim=8 ; trailing comment\n"
      "lr = 0.05\n"
      "gamma = 0.001\n"
      "\n"
      "[strategy]\n"
      "strategy = hybrid\n"
      "gold_mix_fraction = 0.4\n"
      "split_seed = 9\n");
  config::apply_stream(s, in);
  CHECK(s.model.seq_len == 24);
  CHECK(s.model.embed_dim == 8);
  CHECK(s.model.learning_rate == doctest::Approx(0.05));
  CHECK(s.model.l2 == doctest::Approx(0.001));
  CHECK(s.strategy.strategy == train::Strategy::kHybrid);
  CHECK(s.strategy.gold_mix_fraction == doctest::Approx(0.4));
  CHECK(s.strategy.split_seed == 9);
  CHECK(s.model.hidden_dim == mtlnet::ModelConfig{}.hidden_dim);
}

TEST_CASE("config overrides and errors") {
  config::Settings s;
  config::apply_override(s, "max_epochs=7");
  CHECK(s.model.max_epochs == 7);
  config::apply_override(s, " model_seed = 12 ");
  CHECK(s.strategy.model_seed == 12);
  CHECK(code_of([&] { config::apply_override(s, "max_epochs"); }) == ErrorCode::kParse);
  CHECK(code_of([&] { config::apply_override(s, "nonsense=1"); }) == ErrorCode::kParse);
  CHECK(code_of([&] { config::apply_override(s, "seq_len=abc"); }) == ErrorCode::kParse);
  CHECK(code_of([&] { config::apply_override(s, "seq_len=12x"); }) == ErrorCode::kParse);
  CHECK(code_of([&] { config::apply_override(s, "strategy=bogus"); }) == ErrorCode::kParse);
  std::istringstream bad("seq_len = 4\nwhat = 2\n");
  try {
    config::apply_stream(s, bad);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(code_of([] {
          config::Settings t;
          config::apply_file(t, "/nonexistent/adlens.conf");
        }) == ErrorCode::kIo);
}

TEST_CASE("every known key is accepted") {
  for (const auto& key : config::known_keys()) {
    config::Settings s;
    const std::string value = key == "strategy" ? "full" : "1";
    CHECK_NOTHROW(config::set_value(s, key, value));
  }
}

TEST_CASE("config path from the environment") {
  ::setenv(config::kConfigEnv, "", 1);
  CHECK_FALSE(config::env_config_path());
  ::setenv(config::kConfigEnv, "/tmp/x.conf", 1);
  REQUIRE(config::env_config_path());
  CHECK(config::env_config_path()->string() == "/tmp/x.conf");
  ::unsetenv(config::kConfigEnv);
  CHECK_FALSE(config::env_config_path());
}

TEST_CASE("the shipped fixture config parses") {
  config::Settings s;
  config::apply_file(s, std::filesystem::path(ADLENS_FIXTURE_DIR) / "model.conf");
  CHECK(s.model.seq_len == 16);
  CHECK(s.model.embed_dim == 32);
  CHECK_NOTHROW(s.model.validate());
}

// ---- validator ----------------------------------------------------------------

TEST_CASE("validator enforces the supported keywords") {
  const Json schema = Json::parse(R"({
    "type": "object",
    "required": ["a", "b"],
    "additionalProperties": false,
    "properties": {
      "a": {"type": "integer", "minimum": 0},
      "b": {"type": "array", "minItems": 1, "items": {"type": "string", "enum": ["x", "y"]}},
      "c": {"type": ["number", "null"], "maximum": 1}
    }
  })");
  CHECK(report::validate(Json::parse(R"({"a": 3, "b": ["x"]})"), schema).empty());
  CHECK(report::validate(Json::parse(R"({"a": 3, "b": ["x"], "c": null})"), schema).empty());
  CHECK(report::validate(Json::parse(R"({"a": 3, "b": ["y"], "c": 0.5})"), schema).empty());
  CHECK_FALSE(report::validate(Json::parse(R"({"a": 3})"), schema).empty());
  CHECK_FALSE(report::validate(Json::parse(R"({"a": -1, "b": ["x"]})"), schema).empty());
  CHECK_FALSE(report::validate(Json::parse(R"({"a": 1.5, "b": ["x"]})"), schema).empty());
  CHECK_FALSE(report::validate(Json::parse(R"({"a": 1, "b": []})"), schema).empty());
  CHECK_FALSE(report::validate(Json::parse(R"({"a": 1, "b": ["z"]})"), schema).empty());
  CHECK_FALSE(report::validate(Json::parse(R"({"a": 1, "b": ["x"], "c": 2})"), schema).empty());
  CHECK_FALSE(report::validate(Json::parse(R"({"a": 1, "b": ["x"], "d": 0})"), schema).empty());
  CHECK_FALSE(report::validate(Json::parse(R"([1, 2])"), schema).empty());
  const auto issues = report::validate(Json::parse(R"({"a": "no", "b": ["x"]})"), schema);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].find("a") != std::string::npos);
}

TEST_CASE("non-finite numbers become null") {
  CHECK(report::number_or_null(1.5) == Json(1.5));
  CHECK(report::number_or_null(std::nan("")).is_null());
  CHECK(report::number_or_null(INFINITY).is_null());
  stats::TestResult r;
  r.statistic = std::nan("");
  r.dof = 2;
  r.p_value = 0.5;
  const Json j = report::test_result_json(r);
  CHECK(j["statistic"].is_null());
  CHECK(j["p_value"] == Json(0.5));
}

TEST_CASE("manifest from a real run validates and rejects tampering") {
  const auto bench = synth::make_benchmark({30, 60, 0.3, 2});
  mtlnet::ModelConfig cfg;
  cfg.seq_len = 8;
  cfg.embed_dim = 8;
  cfg.hidden_dim = 4;
  cfg.repr_dim = 4;
  cfg.batch_size = 8;
  cfg.max_epochs = 2;
  cfg.patience = 1;
  train::StrategyConfig sc;
  sc.strategy = train::Strategy::kTwoStage1;
  sc.split_seed = 1;
  sc.model_seed = 2;
  const embed::EmbeddingSource src{nullptr, embed::FallbackEncoder{8, 0}};
  const auto run = train::run(bench.gold, bench.weak, cfg, sc, src);
  const Json m = report::run_manifest(run, cfg, sc,
                                      {corpus::dataset_digest(bench.gold),
                                       corpus::dataset_digest(bench.weak), "checkpoint.json"});
  const auto issues = report::validate(m, report::manifest_schema());
  for (const auto& i : issues) INFO(i);
  CHECK(issues.empty());
  CHECK(m["strategy"] == "TwoStage1");
  CHECK(m["stage1_epochs"].is_number_integer());
  // Only classes present in the test labels are listed.
  const auto& per_class = m["metrics"]["theme"]["per_class_f1"];
  CHECK(per_class.size() >= 1);
  CHECK(per_class.size() <= kThemeCount);
  for (const auto& c : per_class) CHECK(c["class"].is_string());

  Json extra = m;
  extra["timestamp"] = "2021-01-01";
  CHECK_FALSE(report::validate(extra, report::manifest_schema()).empty());
  Json missing = m;
  missing.erase("seeds");
  CHECK_FALSE(report::validate(missing, report::manifest_schema()).empty());
  Json bad_strategy = m;
  bad_strategy["strategy"] = "Mystery";
  CHECK_FALSE(report::validate(bad_strategy, report::manifest_schema()).empty());
  Json bad_f1 = m;
  bad_f1["metrics"]["mf"]["macro_f1"] = 1.5;
  CHECK_FALSE(report::validate(bad_f1, report::manifest_schema()).empty());
}

TEST_CASE("json files round trip and bad input is a parse error") {
  testutil::TempDir dir("report");
  const Json doc = {{"b", 1}, {"a", {1, 2, 3}}};
  report::write_json(dir / "x.json", doc);
  CHECK(report::read_json(dir / "x.json") == doc);
  const std::string text = testutil::slurp(dir / "x.json");
  CHECK(text.back() == '\n');
  report::write_json(dir / "y.json", doc);
  CHECK(testutil::slurp(dir / "y.json") == text);
  testutil::spit(dir / "bad.json", "{not json");
  CHECK(code_of([&] { report::read_json(dir / "bad.json"); }) == ErrorCode::kParse);
  CHECK(code_of([&] { report::read_json(dir / "missing.json"); }) == ErrorCode::kIo);
}
