#pragma once

// Supervision strategies for the multi-task network: fully supervised on
// gold, hybrid (gold mixed into weak batches), and two-stage pre-train /
// fine-tune, plus early stopping, evaluation and repeated-seed comparison.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adlens/corpus.hpp"
#include "adlens/embed.hpp"
#include "adlens/metrics.hpp"
#include "adlens/mtlnet.hpp"
#include "adlens/stats.hpp"

namespace adlens::train {

enum class Strategy { kFullySupervised, kHybrid, kTwoStage1, kTwoStage2 };

std::string_view strategy_name(Strategy s);
// Accepts the canonical names and the short forms full, hybrid, two_stage1,
// two_stage2.
std::optional<Strategy> parse_strategy(std::string_view s);
bool needs_weak(Strategy s);

struct StrategyConfig {
  Strategy strategy = Strategy::kFullySupervised;
  double gold_mix_fraction = 0.30;
  double weak_mix_fraction = 0.30;  // TwoStage2 only
  std::uint64_t split_seed = 0;
  std::uint64_t model_seed = 0;

  void validate() const;
};

// Records become examples; every record needs a label. An Unassigned theme
// leaves the theme target empty.
std::vector<mtlnet::Example> encode(const corpus::Dataset& dataset, const mtlnet::ModelConfig& cfg,
                                    const embed::EmbeddingSource& source);

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean batch total over the epoch
  double val_loss = 0.0;    // l_theme + l_mf on the validation split
};

// Every id that entered a training batch or a validation pass, and every
// test id. Used to prove test isolation.
struct IdTrace {
  std::set<std::string> train;
  std::set<std::string> val;
  std::set<std::string> test;

  bool isolated() const;
};

struct FitResult {
  mtlnet::ModelParams params;  // minimum validation loss
  std::size_t epochs_run = 0;
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  std::vector<EpochLog> curve;
};

// Shuffled mini-batch Adam with early stopping on validation loss. The batch
// shrinks to the training split size (with a warning) when the split is
// smaller than one batch.
FitResult fit(const mtlnet::ModelParams& init, const mtlnet::ModelConfig& cfg,
              std::span<const mtlnet::Example> train, std::span<const mtlnet::Example> val,
              mtlnet::ParamScope scope, std::uint64_t seed, IdTrace* trace = nullptr,
              std::vector<std::string>* warnings = nullptr);

struct Evaluation {
  TaskMetrics theme;
  TaskMetrics mf;
};

// Theme is scored over examples with a theme target, MF over all.
Evaluation evaluate(const mtlnet::ModelParams& params, const mtlnet::ModelConfig& cfg,
                    std::span<const mtlnet::Example> test);

struct RunResult {
  Strategy strategy = Strategy::kFullySupervised;
  std::uint64_t split_seed = 0;
  std::uint64_t model_seed = 0;
  Evaluation metrics;
  std::size_t epochs_run = 0;  // final stage
  double best_val_loss = 0.0;
  std::vector<EpochLog> curve;
  mtlnet::ModelParams params;
  std::optional<mtlnet::ModelParams> pretrained;  // stage-1 output (two-stage)
  std::optional<FitResult> stage1;
  IdTrace trace;
  std::vector<std::string> test_ids;
  std::vector<std::string> warnings;
  std::size_t weak_overlap_dropped = 0;  // weak ads whose id is also gold
};

// Gold and weak must both be fully labeled; weak may be empty except for
// the two-stage strategies.
RunResult run(const corpus::Dataset& gold, const corpus::Dataset& weak,
              const mtlnet::ModelConfig& cfg, const StrategyConfig& strategy,
              const embed::EmbeddingSource& source);

// Gold test ids shared by every strategy for a given split seed: the
// fully-supervised test slice, which the hybrid test slice contains.
std::vector<std::string> common_test_ids(const corpus::Dataset& gold, std::uint64_t split_seed);

struct Comparison {
  std::string metric;  // e.g. "theme.macro_f1"
  std::vector<double> values;
  std::vector<double> baseline_values;
  double mean = 0.0;
  double baseline_mean = 0.0;
  std::optional<stats::TestResult> paired_t;  // empty when degenerate
};

struct RepeatResult {
  std::vector<RunResult> runs;
  std::vector<RunResult> baseline_runs;
  std::vector<Comparison> comparisons;
};

// k runs per strategy with model seeds model_seed + i; a paired t-test per
// metric against the baseline.
RepeatResult repeat_runs(const corpus::Dataset& gold, const corpus::Dataset& weak,
                         const mtlnet::ModelConfig& cfg, const StrategyConfig& strategy,
                         Strategy baseline, std::size_t k, const embed::EmbeddingSource& source);

}  // namespace adlens::train
