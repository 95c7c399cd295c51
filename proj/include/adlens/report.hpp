#pragma once

// JSON artifacts: the per-run manifest and the pipeline report, their
// schemas, and a validator for the schema subset they use (type, required,
// properties, additionalProperties, items, enum, minimum, maximum,
// minItems). Output carries no timestamps, so reruns are byte-identical.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "adlens/analysis.hpp"
#include "adlens/corpus.hpp"
#include "adlens/metrics.hpp"
#include "adlens/mtlnet.hpp"
#include "adlens/stats.hpp"
#include "adlens/train.hpp"
#include "adlens/weaklabel.hpp"

namespace adlens::report {

using Json = nlohmann::json;

inline constexpr int kManifestVersion = 1;
inline constexpr int kPipelineReportVersion = 1;

// Non-finite statistics become null.
Json number_or_null(double v);
Json test_result_json(const stats::TestResult& r);
Json task_metrics_json(const TaskMetrics& m, int num_classes, bool theme);
Json evaluation_json(const train::Evaluation& e);
Json model_config_json(const mtlnet::ModelConfig& c);

struct ManifestInputs {
  std::string gold_digest;
  std::optional<std::string> weak_digest;
  std::string checkpoint;  // path relative to the manifest
};

Json run_manifest(const train::RunResult& run, const mtlnet::ModelConfig& cfg,
                  const train::StrategyConfig& strategy, const ManifestInputs& inputs);

Json quality_json(const weaklabel::QualityReport& q);
Json group_values_json(const std::vector<corpus::GroupValue>& values);
Json crosstab_json(const corpus::CrossTab& t);
Json association_json(const analysis::AssociationResult& a);
Json contrast_json(const analysis::ContrastResult& c);
Json causality_json(const analysis::CausalityResult& c);

const Json& manifest_schema();
const Json& pipeline_report_schema();

// Empty when `doc` conforms; otherwise one "path: problem" line per issue.
std::vector<std::string> validate(const Json& doc, const Json& schema);

// Pretty-printed with a trailing newline; throws kIo on failure.
void write_json(const std::filesystem::path& path, const Json& doc);
Json read_json(const std::filesystem::path& path);

}  // namespace adlens::report
