// adlens: ingest ads, weak-label them, train the multi-task classifier,
// evaluate checkpoints and write the analysis report.
//
// Errors print as "E_<CODE>: message" on stderr with exit status 2.
// gradcheck exits 3 when the tolerance is exceeded.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "adlens/analysis.hpp"
#include "adlens/checkpoint.hpp"
#include "adlens/config.hpp"
#include "adlens/corpus.hpp"
#include "adlens/embed.hpp"
#include "adlens/error.hpp"
#include "adlens/mtlnet.hpp"
#include "adlens/report.hpp"
#include "adlens/text.hpp"
#include "adlens/train.hpp"
#include "adlens/weaklabel.hpp"

namespace fs = std::filesystem;
using adlens::Error;
using adlens::ErrorCode;
using adlens::report::Json;

namespace {

constexpr double kGradTolerance = 1e-4;
constexpr int kGradCheckFailed = 3;

// ---- shared helpers ----------------------------------------------------------

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

adlens::corpus::AdFormat parse_format(const std::string& s) {
  if (s == "jsonl") return adlens::corpus::AdFormat::kJsonl;
  if (s == "csv") return adlens::corpus::AdFormat::kCsv;
  throw Error(ErrorCode::kInvalidArgument, "unknown format " + s);
}

struct Embeddings {
  std::optional<adlens::embed::EmbeddingStore> store;
  adlens::embed::EmbeddingSource source;
};

// The store must outlive the source, so both live in one heap object.
std::unique_ptr<Embeddings> make_embeddings(const std::string& path, std::size_t dim,
                                            std::uint64_t seed) {
  auto e = std::make_unique<Embeddings>();
  if (!path.empty()) {
    e->store = adlens::embed::load_store(path);
    if (e->store->dim() != dim) {
      throw Error(ErrorCode::kInvalidArgument, "embedding store has dim " +
                                                   std::to_string(e->store->dim()) + ", expected " +
                                                   std::to_string(dim));
    }
    e->source.store = &*e->store;
  }
  e->source.fallback = adlens::embed::FallbackEncoder{dim, seed};
  return e;
}

// Records that carry a label after attaching `labels`.
adlens::corpus::Dataset labeled_subset(const adlens::corpus::Dataset& ads,
                                       const std::vector<adlens::corpus::LabelPair>& labels) {
  adlens::corpus::Dataset all = ads;
  adlens::corpus::attach_labels(all, labels);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < all.records.size(); ++i) {
    if (all.label_for(all.records[i].id)) keep.push_back(i);
  }
  return adlens::corpus::select(all, keep);
}

std::map<std::string, adlens::corpus::LabelPair> by_id(const std::vector<adlens::corpus::LabelPair>& labels) {
  std::map<std::string, adlens::corpus::LabelPair> out;
  for (const auto& l : labels) out[l.ad_id] = l;
  return out;
}

std::string relative_to(const fs::path& target, const fs::path& base_dir) {
  const fs::path t = fs::absolute(target).lexically_normal();
  const fs::path b = fs::absolute(base_dir.empty() ? fs::path(".") : base_dir).lexically_normal();
  return t.lexically_relative(b).generic_string();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) { return adlens::report::number_or_null(v).dump(); }

void write_group_csv(const fs::path& path, const std::vector<adlens::corpus::GroupValue>& values) {
  auto out = open_out(path);
  out << "group,value\n";
  for (const auto& g : values) out << csv_field(g.group) << ',' << csv_number(g.value) << '\n';
}

void write_crosstab_csv(const fs::path& path, const adlens::corpus::CrossTab& t) {
  auto out = open_out(path);
  out << "row";
  for (const auto& c : t.cols) out << ',' << csv_field(c);
  out << '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out << csv_field(t.rows[r]);
    for (double v : t.values[r]) out << ',' << csv_number(v);
    out << '\n';
  }
}

std::string optional_number(const std::optional<adlens::stats::TestResult>& t, bool p) {
  if (!t) return "";
  return csv_number(p ? t->p_value : t->statistic);
}

void print_metrics_row(std::ostream& out, std::string_view label, const adlens::train::Evaluation& e) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-16s theme acc %.4f f1 %.4f | mf acc %.4f f1 %.4f\n",
                std::string(label).c_str(), e.theme.accuracy, e.theme.macro_f1, e.mf.accuracy,
                e.mf.macro_f1);
  out << buf;
}

// ---- ingest ----------------------------------------------------------------------

struct IngestArgs {
  std::string ads;
  std::string format = "jsonl";
  std::string out;
  bool dedup = false;
};

int cmd_ingest(const IngestArgs& a) {
  auto dataset = adlens::corpus::load_ads(a.ads, parse_format(a.format));
  const std::size_t loaded = dataset.size();
  if (a.dedup) dataset = adlens::corpus::dedup_by_content(dataset);
  auto out = open_out(a.out);
  adlens::corpus::write_ads_jsonl(out, dataset);
  std::cout << "records " << loaded << "\n";
  if (a.dedup) std::cout << "distinct " << dataset.size() << "\n";
  std::cout << "digest " << adlens::corpus::dataset_digest(dataset) << "\n";
  return 0;
}

// ---- weaklabel -------------------------------------------------------------------

struct WeaklabelArgs {
  std::string ads;
  std::string lexicon;
  std::string phrases;
  std::string embeddings;
  double threshold = adlens::weaklabel::kDefaultThreshold;
  std::size_t dim = 64;
  std::uint64_t seed = 0;
  std::string out;
  std::string gold;
  std::string report;
};

int cmd_weaklabel(const WeaklabelArgs& a) {
  if (a.threshold < 0.0 || a.threshold > 2.0) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in [0, 2]");
  }
  const auto dataset = adlens::corpus::load_ads(a.ads, adlens::corpus::AdFormat::kJsonl);
  const auto lexicon =
      a.lexicon.empty() ? adlens::weaklabel::default_lexicon() : adlens::weaklabel::load_lexicon(a.lexicon);
  const auto texts = a.phrases.empty() ? adlens::weaklabel::default_phrase_texts()
                                       : adlens::weaklabel::load_phrase_file(a.phrases);
  const auto emb = make_embeddings(a.embeddings, a.dim, a.seed);
  const auto bank = adlens::weaklabel::build_phrase_bank(texts, emb->source);
  const auto run = adlens::weaklabel::generate_weak_labels(dataset, lexicon, bank, emb->source, a.threshold);
  {
    auto out = open_out(a.out);
    adlens::corpus::write_labels_jsonl(out, run.labels);
  }

  std::map<std::string, std::size_t> theme_counts;
  std::map<std::string, std::size_t> mf_counts;
  for (const auto& l : run.labels) {
    ++theme_counts[std::string(adlens::theme_name(l.theme))];
    ++mf_counts[std::string(adlens::mf_name(l.mf))];
  }
  std::cout << "labels " << run.labels.size() << "\n";
  for (const auto& [k, v] : theme_counts) std::cout << "theme " << k << " " << v << "\n";
  for (const auto& [k, v] : mf_counts) std::cout << "mf " << k << " " << v << "\n";
  if (run.silhouette) {
    std::cout << "silhouette " << *run.silhouette << "\n";
  } else {
    std::cout << "silhouette n/a (fewer than two clusters)\n";
  }

  Json quality = nullptr;
  if (!a.gold.empty()) {
    const auto gold = adlens::corpus::load_labels(a.gold, adlens::LabelSource::kGold);
    const auto q = adlens::weaklabel::weak_quality(by_id(run.labels), by_id(gold));
    quality = adlens::report::quality_json(q);
    std::cout << "quality theme acc " << q.theme.accuracy << " f1 " << q.theme.macro_f1 << " | mf acc "
              << q.mf.accuracy << " f1 " << q.mf.macro_f1 << "\n";
  }
  if (!a.report.empty()) {
    Json doc = {{"labels", run.labels.size()},
                {"threshold", a.threshold},
                {"theme_counts", theme_counts},
                {"mf_counts", mf_counts},
                {"silhouette", run.silhouette ? Json(*run.silhouette) : Json(nullptr)},
                {"quality", quality}};
    adlens::report::write_json(a.report, doc);
  }
  return 0;
}

// ---- train -------------------------------------------------------------------------

struct TrainArgs {
  std::string ads;
  std::string gold;
  std::string weak;
  std::string strategy;
  std::string config;
  std::vector<std::string> overrides;
  std::string embeddings;
  std::string out;
};

adlens::config::Settings load_settings(const std::string& config_path,
                                       const std::vector<std::string>& overrides) {
  adlens::config::Settings s;
  if (!config_path.empty()) {
    adlens::config::apply_file(s, config_path);
  } else if (const auto env = adlens::config::env_config_path()) {
    adlens::config::apply_file(s, *env);
  }
  for (const auto& o : overrides) adlens::config::apply_override(s, o);
  return s;
}

int cmd_train(const TrainArgs& a) {
  auto settings = load_settings(a.config, a.overrides);
  if (!a.strategy.empty()) adlens::config::set_value(settings, "strategy", a.strategy);
  const auto& cfg = settings.model;
  const auto& sc = settings.strategy;
  cfg.validate();
  sc.validate();
  if (adlens::train::needs_weak(sc.strategy) && a.weak.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(adlens::train::strategy_name(sc.strategy)) + " needs --weak");
  }

  const auto ads = adlens::corpus::load_ads(a.ads, adlens::corpus::AdFormat::kJsonl);
  const auto gold = labeled_subset(ads, adlens::corpus::load_labels(a.gold, adlens::LabelSource::kGold));
  adlens::corpus::Dataset weak;
  std::optional<std::string> weak_digest;
  if (!a.weak.empty()) {
    weak = labeled_subset(ads, adlens::corpus::load_labels(a.weak, adlens::LabelSource::kWeak));
    weak_digest = adlens::corpus::dataset_digest(weak);
  }
  const auto emb = make_embeddings(a.embeddings, cfg.embed_dim, 0);
  const auto result = adlens::train::run(gold, weak, cfg, sc, emb->source);

  const fs::path dir(a.out);
  fs::create_directories(dir);
  adlens::mtlnet::save_checkpoint(dir / "checkpoint.json", cfg, result.params);
  const Json manifest = adlens::report::run_manifest(
      result, cfg, sc, {adlens::corpus::dataset_digest(gold), weak_digest, "checkpoint.json"});
  const auto problems = adlens::report::validate(manifest, adlens::report::manifest_schema());
  if (!problems.empty()) throw Error(ErrorCode::kInvalidArgument, "manifest invalid: " + problems.front());
  adlens::report::write_json(dir / "manifest.json", manifest);

  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  print_metrics_row(std::cout, adlens::train::strategy_name(result.strategy), result.metrics);
  std::cout << "epochs " << result.epochs_run << " best_val_loss " << result.best_val_loss << "\n";
  return 0;
}

// ---- evaluate ----------------------------------------------------------------------

struct EvaluateArgs {
  std::string checkpoint;
  std::string ads;
  std::string labels;
  std::string embeddings;
  std::string out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const auto ckpt = adlens::mtlnet::load_checkpoint(a.checkpoint);
  const auto ads = adlens::corpus::load_ads(a.ads, adlens::corpus::AdFormat::kJsonl);
  const auto data = labeled_subset(ads, adlens::corpus::load_labels(a.labels, adlens::LabelSource::kGold));
  if (data.empty()) throw Error(ErrorCode::kInvalidArgument, "no labeled ads to evaluate");
  const auto emb = make_embeddings(a.embeddings, ckpt.config.embed_dim, 0);
  const auto examples = adlens::train::encode(data, ckpt.config, emb->source);
  const auto e = adlens::train::evaluate(ckpt.params, ckpt.config, examples);
  print_metrics_row(std::cout, "evaluate", e);
  if (!a.out.empty()) adlens::report::write_json(a.out, adlens::report::evaluation_json(e));
  return 0;
}

// ---- analyze -----------------------------------------------------------------------

struct AnalyzeArgs {
  std::string ads;
  std::vector<std::string> labels;
  std::string gold;
  std::string weak;
  std::vector<std::string> manifests;
  std::string deaths;
  std::size_t max_lag = 14;
  std::vector<std::string> series_themes;
  std::size_t top_terms = 20;
  std::string out;
  std::string tables;
};

std::vector<adlens::Theme> parse_themes(const std::vector<std::string>& names) {
  std::vector<adlens::Theme> out;
  for (const auto& n : names) {
    const auto t = adlens::parse_theme(n);
    if (!t || *t == adlens::Theme::kUnassigned) {
      throw Error(ErrorCode::kInvalidArgument, "unknown theme " + n);
    }
    out.push_back(*t);
  }
  return out;
}

Json measures_json(const adlens::corpus::Dataset& d, adlens::corpus::GroupBy g) {
  using adlens::corpus::Measure;
  return {{"count", adlens::report::group_values_json(adlens::corpus::aggregate(d, g, Measure::kCount))},
          {"spend_mid", adlens::report::group_values_json(adlens::corpus::aggregate(d, g, Measure::kSpendMid))},
          {"impressions_mid",
           adlens::report::group_values_json(adlens::corpus::aggregate(d, g, Measure::kImpressionsMid))}};
}

int cmd_analyze(const AnalyzeArgs& a) {
  using adlens::corpus::GroupBy;
  using adlens::corpus::Measure;
  namespace corpus = adlens::corpus;
  namespace rep = adlens::report;

  const fs::path report_path(a.out);
  const fs::path report_dir = report_path.parent_path();
  if (!report_dir.empty()) fs::create_directories(report_dir);

  auto dataset = corpus::load_ads(a.ads, corpus::AdFormat::kJsonl);
  for (const auto& path : a.labels) {
    corpus::attach_labels(dataset, corpus::load_labels(path, adlens::LabelSource::kGold));
  }
  std::size_t labeled = 0;
  for (const auto& r : dataset.records) labeled += dataset.label_for(r.id) ? 1 : 0;

  Json doc;
  doc["schema_version"] = rep::kPipelineReportVersion;
  doc["corpus"] = {{"digest", corpus::dataset_digest(dataset)},
                   {"records", dataset.size()},
                   {"labeled", labeled},
                   {"label_coverage", dataset.empty() ? 0.0 : double(labeled) / double(dataset.size())}};

  doc["weak_label_quality"] = nullptr;
  if (!a.gold.empty() != !a.weak.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--gold and --weak go together");
  }
  if (!a.gold.empty()) {
    const auto q = adlens::weaklabel::weak_quality(
        by_id(corpus::load_labels(a.weak, adlens::LabelSource::kWeak)),
        by_id(corpus::load_labels(a.gold, adlens::LabelSource::kGold)));
    doc["weak_label_quality"] = rep::quality_json(q);
  }

  Json strategies = Json::array();
  for (const auto& m : a.manifests) {
    const Json man = rep::read_json(m);
    const auto problems = rep::validate(man, rep::manifest_schema());
    if (!problems.empty()) throw Error(ErrorCode::kParse, m + ": " + problems.front());
    strategies.push_back({{"strategy", man["strategy"]},
                          {"split_seed", man["seeds"]["split_seed"]},
                          {"model_seed", man["seeds"]["model_seed"]},
                          {"metrics", man["metrics"]},
                          {"epochs_run", man["epochs_run"]},
                          {"manifest", relative_to(m, report_dir)}});
  }
  doc["strategies"] = strategies;

  Json analysis;
  analysis["theme_by_measure"] = measures_json(dataset, GroupBy::kTheme);
  analysis["mf_by_measure"] = measures_json(dataset, GroupBy::kMf);
  const auto entity_theme = corpus::crosstab(dataset, GroupBy::kEntityType, GroupBy::kTheme, Measure::kSpendMid);
  const auto entity_mf = corpus::crosstab(dataset, GroupBy::kEntityType, GroupBy::kMf, Measure::kSpendMid);
  const auto view_theme = corpus::crosstab(dataset, GroupBy::kPoliticalView, GroupBy::kTheme, Measure::kCount);
  const auto view_mf = corpus::crosstab(dataset, GroupBy::kPoliticalView, GroupBy::kMf, Measure::kCount);
  analysis["entity_by_theme"] = rep::crosstab_json(entity_theme);
  analysis["entity_by_mf"] = rep::crosstab_json(entity_mf);
  analysis["view_by_theme"] = rep::crosstab_json(view_theme);
  analysis["view_by_mf"] = rep::crosstab_json(view_mf);
  const auto demographics = corpus::aggregate(dataset, GroupBy::kAgeGender, Measure::kImpressionsMid);
  analysis["demographics"] = rep::group_values_json(demographics);

  Json chi = Json::array();
  for (const auto& g : adlens::analysis::default_association_groups()) {
    chi.push_back(rep::association_json(adlens::analysis::theme_mf_association(dataset, g)));
  }
  analysis["chi_square"] = chi;

  const auto contrasts = adlens::analysis::default_contrasts();
  const auto contrast_results = adlens::analysis::demographic_tests(dataset, contrasts);
  Json tests = Json::array();
  for (const auto& c : contrast_results) tests.push_back(rep::contrast_json(c));
  analysis["t_tests"] = tests;

  Json terms = Json::array();
  for (adlens::Theme t : adlens::all_themes()) {
    const auto top = corpus::term_frequency(dataset, t, a.top_terms);
    if (top.empty()) continue;
    Json list = Json::array();
    for (const auto& tc : top) list.push_back({{"term", tc.term}, {"count", tc.count}});
    terms.push_back({{"theme", adlens::theme_name(t)}, {"terms", list}});
  }
  analysis["term_frequency"] = terms;

  std::optional<adlens::analysis::CausalityResult> causal;
  if (!a.deaths.empty()) {
    const auto deaths = corpus::load_deaths_csv(a.deaths);
    const auto themes = parse_themes(a.series_themes);
    causal = adlens::analysis::causality(dataset, deaths, themes, a.max_lag);
    analysis["granger"] = rep::causality_json(*causal);
  }
  doc["analysis"] = analysis;

  Json artifacts = Json::object();
  if (!a.tables.empty()) {
    const fs::path dir(a.tables);
    fs::create_directories(dir);
    auto add = [&](const std::string& name, const fs::path& file) {
      artifacts[name] = relative_to(dir / file, report_dir);
    };
    for (auto [g, label] : {std::pair{GroupBy::kTheme, "theme"}, std::pair{GroupBy::kMf, "mf"}}) {
      for (auto [m, mname] : {std::pair{Measure::kCount, "count"}, std::pair{Measure::kSpendMid, "spend"},
                              std::pair{Measure::kImpressionsMid, "impressions"}}) {
        const std::string file = std::string(label) + "_by_" + mname + ".csv";
        write_group_csv(dir / file, corpus::aggregate(dataset, g, m));
        add(std::string(label) + "_by_" + mname, file);
      }
    }
    write_crosstab_csv(dir / "entity_by_theme.csv", entity_theme);
    add("entity_by_theme", "entity_by_theme.csv");
    write_crosstab_csv(dir / "entity_by_mf.csv", entity_mf);
    add("entity_by_mf", "entity_by_mf.csv");
    write_group_csv(dir / "demographics.csv", demographics);
    add("demographics", "demographics.csv");
    {
      auto out = open_out(dir / "t_tests.csv");
      out << "kind,theme,age,state,n_a,n_b,statistic,dof,p_value,note\n";
      for (const auto& c : contrast_results) {
        out << (c.contrast.kind == adlens::analysis::ContrastKind::kFemaleVsMale ? "female_vs_male"
                                                                                 : "state_reach")
            << ',' << adlens::theme_name(c.contrast.theme) << ','
            << corpus::age_bucket_name(c.contrast.age) << ',' << csv_field(c.contrast.state) << ','
            << c.n_a << ',' << c.n_b << ',' << optional_number(c.test, false) << ','
            << (c.test ? csv_number(c.test->dof) : "") << ',' << optional_number(c.test, true) << ','
            << csv_field(c.note) << '\n';
      }
    }
    add("t_tests", "t_tests.csv");
    if (causal) {
      auto out = open_out(dir / "granger.csv");
      out << "lag,deaths_to_ads_f,deaths_to_ads_p,ads_to_deaths_f,ads_to_deaths_p\n";
      for (const auto& r : causal->rows) {
        out << r.lag << ',' << csv_number(r.deaths_to_ads.statistic) << ','
            << csv_number(r.deaths_to_ads.p_value) << ',' << csv_number(r.ads_to_deaths.statistic)
            << ',' << csv_number(r.ads_to_deaths.p_value) << '\n';
      }
      add("granger", "granger.csv");
    }
  }
  doc["artifacts"] = artifacts;

  const auto problems = rep::validate(doc, rep::pipeline_report_schema());
  if (!problems.empty()) throw Error(ErrorCode::kInvalidArgument, "report invalid: " + problems.front());
  rep::write_json(report_path, doc);
  std::cout << "report " << report_path.generic_string() << "\n";
  return 0;
}

// ---- gradcheck ---------------------------------------------------------------------

struct GradcheckArgs {
  std::size_t seeds = 5;
  double epsilon = 1e-5;
};

int cmd_gradcheck(const GradcheckArgs& a) {
  const auto cfg = adlens::mtlnet::toy_config();
  double worst = 0.0;
  for (std::size_t s = 0; s < a.seeds; ++s) {
    const auto r = adlens::mtlnet::grad_check(cfg, s, a.epsilon);
    std::cout << "seed " << s << " coords " << r.coordinates << " max_rel_err " << r.max_relative_error
              << " at " << r.worst_tensor << "[" << r.worst_index << "]\n";
    worst = std::max(worst, r.max_relative_error);
  }
  const bool ok = worst < kGradTolerance;
  std::cout << (ok ? "PASS" : "FAIL") << " max_rel_err " << worst << " tolerance " << kGradTolerance << "\n";
  return ok ? 0 : kGradCheckFailed;
}

int report_error(std::string_view code, const std::string& message) {
  std::cerr << code << ": " << message << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adlens: weak supervision and analysis for vaccine ad archives"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate an ad file and write canonical JSONL");
  c_ingest->add_option("--ads", ingest.ads, "Input ads")->required();
  c_ingest->add_option("--format", ingest.format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}));
  c_ingest->add_option("--out", ingest.out, "Output JSONL")->required();
  c_ingest->add_flag("--dedup", ingest.dedup, "Keep the first ad of each distinct body");

  WeaklabelArgs wl;
  auto* c_wl = app.add_subcommand("weaklabel", "Assign weak theme and moral-foundation labels");
  c_wl->add_option("--ads", wl.ads, "Ads JSONL")->required();
  c_wl->add_option("--lexicon", wl.lexicon, "Lexicon file (default: built-in)");
  c_wl->add_option("--phrases", wl.phrases, "Theme phrase JSON (default: built-in)");
  c_wl->add_option("--embeddings", wl.embeddings, "Embedding sidecar file");
  c_wl->add_option("--threshold", wl.threshold, "Cosine distance threshold")->capture_default_str();
  c_wl->add_option("--dim", wl.dim, "Vector dimension")->capture_default_str();
  c_wl->add_option("--seed", wl.seed, "Hashing seed")->capture_default_str();
  c_wl->add_option("--out", wl.out, "Weak label JSONL")->required();
  c_wl->add_option("--gold", wl.gold, "Gold labels for a quality report");
  c_wl->add_option("--report", wl.report, "Summary JSON");

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train the multi-task classifier");
  c_tr->add_option("--ads", tr.ads, "Ads JSONL")->required();
  c_tr->add_option("--gold", tr.gold, "Gold labels")->required();
  c_tr->add_option("--weak", tr.weak, "Weak labels");
  c_tr->add_option("--strategy", tr.strategy, "FullySupervised, Hybrid, TwoStage1 or TwoStage2");
  c_tr->add_option("--config", tr.config, "key = value config (default: $ADLENS_CONFIG)");
  c_tr->add_option("--set", tr.overrides, "Override a config key (k=v), repeatable");
  c_tr->add_option("--embeddings", tr.embeddings, "Embedding sidecar file");
  c_tr->add_option("--out", tr.out, "Output directory")->required();

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Score a checkpoint against labels");
  c_ev->add_option("--checkpoint", ev.checkpoint, "Checkpoint JSON")->required();
  c_ev->add_option("--ads", ev.ads, "Ads JSONL")->required();
  c_ev->add_option("--labels", ev.labels, "Labels JSONL")->required();
  c_ev->add_option("--embeddings", ev.embeddings, "Embedding sidecar file");
  c_ev->add_option("--out", ev.out, "Metrics JSON");

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "Write the pipeline report");
  c_an->add_option("--ads", an.ads, "Ads JSONL")->required();
  c_an->add_option("--labels", an.labels, "Label files; later files override earlier ones")->required();
  c_an->add_option("--gold", an.gold, "Gold labels for weak-label quality");
  c_an->add_option("--weak", an.weak, "Weak labels for weak-label quality");
  c_an->add_option("--manifest", an.manifests, "Training manifests to summarise");
  c_an->add_option("--deaths", an.deaths, "Daily deaths CSV");
  c_an->add_option("--max-lag", an.max_lag, "Largest Granger lag")->capture_default_str()->check(CLI::PositiveNumber);
  c_an->add_option("--series-themes", an.series_themes, "Themes summed into the impressions series (default: every ad)")
      ->delimiter(',');
  c_an->add_option("--top-terms", an.top_terms, "Terms per theme")->capture_default_str();
  c_an->add_option("--out", an.out, "Report JSON")->required();
  c_an->add_option("--tables", an.tables, "Directory for CSV side-tables");

  GradcheckArgs gc;
  auto* c_gc = app.add_subcommand("gradcheck", "Compare backprop against finite differences");
  c_gc->add_option("--seeds", gc.seeds, "Number of seeds")->capture_default_str();
  c_gc->add_option("--eps", gc.epsilon, "Finite-difference step")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_ingest) return cmd_ingest(ingest);
    if (*c_wl) return cmd_weaklabel(wl);
    if (*c_tr) return cmd_train(tr);
    if (*c_ev) return cmd_evaluate(ev);
    if (*c_an) return cmd_analyze(an);
    if (*c_gc) return cmd_gradcheck(gc);
  } catch (const Error& e) {
    return report_error(adlens::error_code_name(e.code()), e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error("E_IO", e.what());
  } catch (const Json::exception& e) {
    return report_error("E_PARSE", e.what());
  } catch (const std::exception& e) {
    return report_error("E_INVALID", e.what());
  }
  return 0;
}
