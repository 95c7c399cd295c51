#include "adlens/report.hpp"

#include <cmath>
#include <fstream>

#include "adlens/error.hpp"

namespace adlens::report {
namespace {

// ---- schema construction helpers ------------------------------------------

Json type(const char* t) { return {{"type", t}}; }
Json num() { return type("number"); }
Json integer_min(int lo) { return {{"type", "integer"}, {"minimum", lo}}; }
Json str() { return type("string"); }
Json unit() { return {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}; }
Json nullable_num() { return {{"type", Json::array({"number", "null"})}}; }
Json arr(Json items) { return {{"type", "array"}, {"items", std::move(items)}}; }
Json str_enum(std::initializer_list<const char*> values) {
  Json e = Json::array();
  for (const char* v : values) e.push_back(v);
  return {{"type", "string"}, {"enum", e}};
}

Json obj(Json properties, std::vector<std::string> required = {}, bool closed = true) {
  Json s = {{"type", "object"}, {"properties", std::move(properties)}};
  if (required.empty()) {
    for (const auto& [k, _] : s["properties"].items()) required.push_back(k);
  }
  s["required"] = required;
  s["additionalProperties"] = !closed;
  return s;
}

Json nullable(Json schema) {
  Json t = schema["type"];
  if (t.is_string()) t = Json::array({t});
  t.push_back("null");
  schema["type"] = t;
  return schema;
}

Json test_schema() {
  return obj({{"statistic", nullable_num()},
              {"dof", num()},
              {"dof2", nullable_num()},
              {"p_value", unit()},
              {"warnings", arr(str())}});
}

Json task_schema() {
  return obj({{"n", integer_min(0)},
              {"accuracy", unit()},
              {"macro_f1", unit()},
              {"per_class_f1", arr(obj({{"class", str()}, {"f1", unit()}}))}});
}

Json evaluation_schema() { return obj({{"theme", task_schema()}, {"mf", task_schema()}}); }

Json config_schema() {
  return obj({{"seq_len", integer_min(1)},
              {"embed_dim", integer_min(1)},
              {"hidden_dim", integer_min(1)},
              {"repr_dim", integer_min(1)},
              {"theme_classes", integer_min(1)},
              {"mf_classes", integer_min(1)},
              {"dropout", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}},
              {"l2", {{"type", "number"}, {"minimum", 0}}},
              {"learning_rate", num()},
              {"batch_size", integer_min(1)},
              {"max_epochs", integer_min(1)},
              {"patience", integer_min(0)},
              {"seed", integer_min(0)}});
}

Json group_values_schema() { return arr(obj({{"group", str()}, {"value", num()}})); }

Json crosstab_schema() {
  return obj({{"rows", arr(str())}, {"cols", arr(str())}, {"values", arr(arr(num()))}});
}

Json strategy_enum() { return str_enum({"FullySupervised", "Hybrid", "TwoStage1", "TwoStage2"}); }

// ---- validator ---------------------------------------------------------------

bool has_type(const Json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  throw Error(ErrorCode::kInvalidArgument, "schema uses unsupported type " + t);
}

void check(const Json& v, const Json& s, const std::string& path, std::vector<std::string>& errors) {
  if (const auto t = s.find("type"); t != s.end()) {
    bool ok = false;
    if (t->is_string()) {
      ok = has_type(v, t->get<std::string>());
    } else {
      for (const auto& alt : *t) ok = ok || has_type(v, alt.get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + t->dump());
      return;
    }
  }
  if (const auto e = s.find("enum"); e != s.end()) {
    if (std::find(e->begin(), e->end(), v) == e->end()) {
      errors.push_back(path + ": value " + v.dump() + " not in enum");
    }
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (const auto lo = s.find("minimum"); lo != s.end() && x < lo->get<double>()) {
      errors.push_back(path + ": below minimum");
    }
    if (const auto hi = s.find("maximum"); hi != s.end() && x > hi->get<double>()) {
      errors.push_back(path + ": above maximum");
    }
  }
  if (v.is_array()) {
    if (const auto mi = s.find("minItems"); mi != s.end() && v.size() < mi->get<std::size_t>()) {
      errors.push_back(path + ": too few items");
    }
    if (const auto items = s.find("items"); items != s.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        check(v[i], *items, path + "[" + std::to_string(i) + "]", errors);
      }
    }
  }
  if (v.is_object()) {
    const Json empty = Json::object();
    const auto props_it = s.find("properties");
    const Json& props = props_it == s.end() ? empty : *props_it;
    if (const auto req = s.find("required"); req != s.end()) {
      for (const auto& k : *req) {
        if (!v.contains(k.get<std::string>())) {
          errors.push_back(path + ": missing \"" + k.get<std::string>() + "\"");
        }
      }
    }
    const bool closed = s.value("additionalProperties", true) == false;
    for (const auto& [k, child] : v.items()) {
      if (const auto p = props.find(k); p != props.end()) {
        check(child, *p, path + "." + k, errors);
      } else if (closed) {
        errors.push_back(path + ": unexpected \"" + k + "\"");
      }
    }
  }
}

}  // namespace

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json test_result_json(const stats::TestResult& r) {
  return {{"statistic", number_or_null(r.statistic)},
          {"dof", r.dof},
          {"dof2", r.dof2 ? Json(*r.dof2) : Json(nullptr)},
          {"p_value", r.p_value},
          {"warnings", r.warnings}};
}

Json task_metrics_json(const TaskMetrics& m, int num_classes, bool theme) {
  Json per = Json::array();
  for (const auto& [cls, f1] : m.per_class_f1) {
    const std::string name = cls >= 0 && cls < num_classes
                                 ? std::string(theme ? theme_name(theme_from_index(cls))
                                                     : mf_name(mf_from_index(cls)))
                                 : std::to_string(cls);
    per.push_back({{"class", name}, {"f1", f1}});
  }
  return {{"n", m.n}, {"accuracy", m.accuracy}, {"macro_f1", m.macro_f1}, {"per_class_f1", per}};
}

Json evaluation_json(const train::Evaluation& e) {
  return {{"theme", task_metrics_json(e.theme, static_cast<int>(kThemeCount), true)},
          {"mf", task_metrics_json(e.mf, static_cast<int>(kMfClassCount), false)}};
}

Json model_config_json(const mtlnet::ModelConfig& c) {
  return {{"seq_len", c.seq_len},         {"embed_dim", c.embed_dim},
          {"hidden_dim", c.hidden_dim},   {"repr_dim", c.repr_dim},
          {"theme_classes", c.theme_classes}, {"mf_classes", c.mf_classes},
          {"dropout", c.dropout},         {"l2", c.l2},
          {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},   {"patience", c.patience},
          {"seed", c.seed}};
}

Json run_manifest(const train::RunResult& run, const mtlnet::ModelConfig& cfg,
                  const train::StrategyConfig& strategy, const ManifestInputs& inputs) {
  Json curve = Json::array();
  for (const auto& e : run.curve) {
    curve.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_loss", e.val_loss}});
  }
  return {{"schema_version", kManifestVersion},
          {"strategy", train::strategy_name(run.strategy)},
          {"seeds", {{"split_seed", run.split_seed}, {"model_seed", run.model_seed}}},
          {"mix", {{"gold_mix_fraction", strategy.gold_mix_fraction},
                   {"weak_mix_fraction", strategy.weak_mix_fraction}}},
          {"datasets", {{"gold_digest", inputs.gold_digest},
                        {"weak_digest", inputs.weak_digest ? Json(*inputs.weak_digest) : Json(nullptr)}}},
          {"config", model_config_json(cfg)},
          {"metrics", evaluation_json(run.metrics)},
          {"epochs_run", run.epochs_run},
          {"best_val_loss", run.best_val_loss},
          {"curve", curve},
          {"stage1_epochs", run.stage1 ? Json(run.stage1->epochs_run) : Json(nullptr)},
          {"test_size", run.test_ids.size()},
          {"weak_overlap_dropped", run.weak_overlap_dropped},
          {"warnings", run.warnings},
          {"checkpoint", inputs.checkpoint}};
}

Json quality_json(const weaklabel::QualityReport& q) {
  return {{"theme", task_metrics_json(q.theme, static_cast<int>(kThemeCount), true)},
          {"mf", task_metrics_json(q.mf, static_cast<int>(kMfClassCount), false)}};
}

Json group_values_json(const std::vector<corpus::GroupValue>& values) {
  Json out = Json::array();
  for (const auto& g : values) out.push_back({{"group", g.group}, {"value", g.value}});
  return out;
}

Json crosstab_json(const corpus::CrossTab& t) {
  return {{"rows", t.rows}, {"cols", t.cols}, {"values", t.values}};
}

Json association_json(const analysis::AssociationResult& a) {
  return {{"group", a.group.name},
          {"rows", a.rows},
          {"cols", a.cols},
          {"counts", a.counts},
          {"test", a.test ? test_result_json(*a.test) : Json(nullptr)},
          {"note", a.note}};
}

Json contrast_json(const analysis::ContrastResult& c) {
  const bool gender = c.contrast.kind == analysis::ContrastKind::kFemaleVsMale;
  return {{"kind", gender ? "female_vs_male" : "state_reach"},
          {"theme", theme_name(c.contrast.theme)},
          {"age", corpus::age_bucket_name(c.contrast.age)},
          {"state", c.contrast.state},
          {"null_hypothesis", c.contrast.null_hypothesis},
          {"n_a", c.n_a},
          {"n_b", c.n_b},
          {"test", c.test ? test_result_json(*c.test) : Json(nullptr)},
          {"note", c.note}};
}

Json causality_json(const analysis::CausalityResult& c) {
  Json themes = Json::array();
  for (Theme t : c.themes) themes.push_back(theme_name(t));
  Json stationarity = Json::array();
  for (const auto& s : c.stationarity) {
    Json adf = nullptr;
    if (s.adf) {
      adf = test_result_json(s.adf->test);
      adf["used_lag"] = s.adf->used_lag;
      adf["nobs"] = s.adf->nobs;
    }
    stationarity.push_back({{"series", s.series}, {"adf", adf}, {"note", s.note}});
  }
  Json rows = Json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"lag", r.lag},
                    {"deaths_to_ads", test_result_json(r.deaths_to_ads)},
                    {"ads_to_deaths", test_result_json(r.ads_to_deaths)}});
  }
  return {{"start", format_date(c.start)},
          {"end", format_date(c.end)},
          {"themes", themes},
          {"stationarity", stationarity},
          {"rows", rows},
          {"skipped_lags", c.skipped_lags}};
}

const Json& manifest_schema() {
  static const Json s = obj({
      {"schema_version", integer_min(1)},
      {"strategy", strategy_enum()},
      {"seeds", obj({{"split_seed", integer_min(0)}, {"model_seed", integer_min(0)}})},
      {"mix", obj({{"gold_mix_fraction", unit()}, {"weak_mix_fraction", unit()}})},
      {"datasets", obj({{"gold_digest", str()}, {"weak_digest", nullable(str())}})},
      {"config", config_schema()},
      {"metrics", evaluation_schema()},
      {"epochs_run", integer_min(1)},
      {"best_val_loss", num()},
      {"curve", arr(obj({{"epoch", integer_min(1)}, {"train_loss", num()}, {"val_loss", num()}}))},
      {"stage1_epochs", nullable(integer_min(1))},
      {"test_size", integer_min(1)},
      {"weak_overlap_dropped", integer_min(0)},
      {"warnings", arr(str())},
      {"checkpoint", str()},
  });
  return s;
}

const Json& pipeline_report_schema() {
  static const Json s = [] {
    const Json measures =
        obj({{"count", group_values_schema()}, {"spend_mid", group_values_schema()},
             {"impressions_mid", group_values_schema()}});
    const Json association = obj({{"group", str()},
                                   {"rows", arr(str())},
                                   {"cols", arr(str())},
                                   {"counts", arr(arr(integer_min(0)))},
                                   {"test", nullable(test_schema())},
                                   {"note", str()}});
    const Json contrast = obj({{"kind", str_enum({"female_vs_male", "state_reach"})},
                               {"theme", str()},
                               {"age", str()},
                               {"state", str()},
                               {"null_hypothesis", str()},
                               {"n_a", integer_min(0)},
                               {"n_b", integer_min(0)},
                               {"test", nullable(test_schema())},
                               {"note", str()}});
    Json adf = test_schema();
    adf["properties"]["used_lag"] = integer_min(0);
    adf["properties"]["nobs"] = integer_min(1);
    adf["required"].push_back("used_lag");
    adf["required"].push_back("nobs");
    const Json granger = obj({{"start", str()},
                              {"end", str()},
                              {"themes", arr(str())},
                              {"stationarity",
                               arr(obj({{"series", str()}, {"adf", nullable(adf)}, {"note", str()}}))},
                              {"rows", arr(obj({{"lag", integer_min(1)},
                                                {"deaths_to_ads", test_schema()},
                                                {"ads_to_deaths", test_schema()}}))},
                              {"skipped_lags", arr(integer_min(1))}});
    const Json terms = arr(obj({{"theme", str()},
                                {"terms", arr(obj({{"term", str()}, {"count", integer_min(1)}}))}}));
    const Json analysis_block = obj(
        {{"theme_by_measure", measures},
         {"mf_by_measure", measures},
         {"entity_by_theme", crosstab_schema()},
         {"entity_by_mf", crosstab_schema()},
         {"view_by_theme", crosstab_schema()},
         {"view_by_mf", crosstab_schema()},
         {"demographics", group_values_schema()},
         {"chi_square", arr(association)},
         {"t_tests", arr(contrast)},
         {"term_frequency", terms},
         {"granger", granger}},
        {"theme_by_measure", "mf_by_measure", "entity_by_theme", "entity_by_mf", "view_by_theme",
         "view_by_mf", "demographics", "chi_square", "t_tests", "term_frequency"});
    const Json strategy = obj({{"strategy", strategy_enum()},
                               {"split_seed", integer_min(0)},
                               {"model_seed", integer_min(0)},
                               {"metrics", evaluation_schema()},
                               {"epochs_run", integer_min(1)},
                               {"manifest", str()}});
    return obj({{"schema_version", integer_min(1)},
                {"corpus", obj({{"digest", str()},
                                {"records", integer_min(0)},
                                {"labeled", integer_min(0)},
                                {"label_coverage", unit()}})},
                {"weak_label_quality", nullable(obj({{"theme", task_schema()}, {"mf", task_schema()}}))},
                {"strategies", arr(strategy)},
                {"analysis", analysis_block},
                {"artifacts", {{"type", "object"}, {"additionalProperties", true}}}});
  }();
  return s;
}

std::vector<std::string> validate(const Json& doc, const Json& schema) {
  std::vector<std::string> errors;
  check(doc, schema, "$", errors);
  return errors;
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kParse, path.string() + ": " + e.what());
  }
}

}  // namespace adlens::report
