#include "adlens/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adlens/error.hpp"
#include "adlens/rng.hpp"

namespace adlens::train {
namespace {

using mtlnet::Example;
using mtlnet::ModelConfig;
using mtlnet::ModelParams;

// Salts keep the seeded streams for different purposes independent.
constexpr std::uint64_t kPoolShuffleSalt = 0x68796272696450ULL;
constexpr std::uint64_t kWeakSplitSalt = 0x7765616b73706cULL;
constexpr std::uint64_t kWeakMixSalt = 0x7765616b6d6978ULL;
constexpr std::uint64_t kStageTwoSalt = 0x7374616765320aULL;

std::vector<Example> pick(std::span<const Example> all, std::span<const std::size_t> idx) {
  std::vector<Example> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(all[i]);
  return out;
}

std::vector<std::size_t> range(std::size_t begin, std::size_t end, std::span<const std::size_t> order) {
  return {order.begin() + static_cast<std::ptrdiff_t>(begin),
          order.begin() + static_cast<std::ptrdiff_t>(end)};
}

std::size_t floor_fraction(std::size_t n, double f) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
}

// Splits `n` shuffled items into train/val with the given train fraction.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> two_way(std::size_t n, double train_fraction,
                                                                      std::uint64_t seed) {
  const auto order = shuffled_indices(n, seed);
  const std::size_t n_train = floor_fraction(n, train_fraction);
  return {range(0, n_train, order), range(n_train, n, order)};
}

void require_labeled(const corpus::Dataset& d, std::string_view what) {
  for (const auto& r : d.records) {
    if (!d.label_for(r.id)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + " ad " + r.id + " has no label");
    }
  }
}

void require_nonempty(std::span<const Example> s, std::string_view what) {
  if (s.empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " split is empty; need more data");
  }
}

double validation_loss(const ModelParams& params, const ModelConfig& cfg,
                       std::span<const Example> val) {
  const auto batch = mtlnet::as_batch(val);
  const mtlnet::LossReport r = mtlnet::batch_loss(params, cfg, batch, 0.0);
  return r.l_theme + r.l_mf;
}

}  // namespace

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kFullySupervised: return "FullySupervised";
    case Strategy::kHybrid: return "Hybrid";
    case Strategy::kTwoStage1: return "TwoStage1";
    case Strategy::kTwoStage2: return "TwoStage2";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  if (s == "FullySupervised" || s == "full") return Strategy::kFullySupervised;
  if (s == "Hybrid" || s == "hybrid") return Strategy::kHybrid;
  if (s == "TwoStage1" || s == "two_stage1") return Strategy::kTwoStage1;
  if (s == "TwoStage2" || s == "two_stage2") return Strategy::kTwoStage2;
  return std::nullopt;
}

bool needs_weak(Strategy s) { return s != Strategy::kFullySupervised; }

void StrategyConfig::validate() const {
  const auto in_unit = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in_unit(gold_mix_fraction) || !in_unit(weak_mix_fraction)) {
    throw Error(ErrorCode::kInvalidArgument, "mix fractions must lie in (0, 1)");
  }
}

bool IdTrace::isolated() const {
  for (const auto& id : test) {
    if (train.contains(id) || val.contains(id)) return false;
  }
  return true;
}

std::vector<Example> encode(const corpus::Dataset& dataset, const ModelConfig& cfg,
                            const embed::EmbeddingSource& source) {
  if (source.dim() != cfg.embed_dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding dim " + std::to_string(source.dim()) + " differs from model embed_dim " +
                    std::to_string(cfg.embed_dim));
  }
  std::vector<Example> out;
  out.reserve(dataset.size());
  for (const auto& r : dataset.records) {
    const corpus::LabelPair* label = dataset.label_for(r.id);
    if (!label) throw Error(ErrorCode::kInvalidArgument, "ad " + r.id + " has no label");
    Example ex;
    ex.id = r.id;
    ex.seq = embed::token_sequence(r.id, r.body, cfg.seq_len, source);
    if (label->theme != Theme::kUnassigned) ex.target.theme = static_cast<int>(index_of(label->theme));
    ex.target.mf = static_cast<int>(index_of(label->mf));
    out.push_back(std::move(ex));
  }
  return out;
}

FitResult fit(const ModelParams& init, const ModelConfig& cfg, std::span<const Example> train,
              std::span<const Example> val, mtlnet::ParamScope scope, std::uint64_t seed,
              IdTrace* trace, std::vector<std::string>* warnings) {
  cfg.validate();
  mtlnet::check_shapes(init, cfg);
  require_nonempty(train, "training");
  require_nonempty(val, "validation");
  std::size_t batch_size = cfg.batch_size;
  if (train.size() < batch_size) {
    batch_size = train.size();
    if (warnings) {
      warnings->push_back("batch size reduced to " + std::to_string(batch_size) +
                          " (training split size)");
    }
  }
  if (trace) {
    for (const Example& e : train) trace->train.insert(e.id);
    for (const Example& e : val) trace->val.insert(e.id);
  }

  Rng rng(seed);
  FitResult out;
  ModelParams params = init;
  mtlnet::AdamState state = mtlnet::AdamState::zeros_like(params);
  out.params = init;
  out.best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t step = 0;
  std::size_t stale = 0;
  std::vector<const Example*> batch;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_in_place(order, rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(&train[order[i]]);
      const mtlnet::BatchGradient g = mtlnet::backward(params, cfg, batch, cfg.l2, &rng);
      mtlnet::AdamResult next =
          mtlnet::adam_step(params, g.grads, state, cfg.learning_rate, ++step, scope);
      params = std::move(next.params);
      state = std::move(next.state);
      loss_sum += g.loss.total;
      ++batches;
    }
    const double val_loss = validation_loss(params, cfg, val);
    out.curve.push_back({epoch, loss_sum / static_cast<double>(batches), val_loss});
    out.epochs_run = epoch;
    if (val_loss < out.best_val_loss) {
      out.best_val_loss = val_loss;
      out.best_epoch = epoch;
      out.params = params;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }
  return out;
}

Evaluation evaluate(const ModelParams& params, const ModelConfig& cfg, std::span<const Example> test) {
  if (test.empty()) throw Error(ErrorCode::kInvalidArgument, "empty test set");
  std::vector<int> theme_gold, theme_pred, mf_gold, mf_pred;
  for (const Example& e : test) {
    const mtlnet::ForwardTrace tr = mtlnet::forward(params, cfg, e.seq, nullptr);
    if (e.target.theme) {
      theme_gold.push_back(*e.target.theme);
      theme_pred.push_back(mtlnet::argmax(tr.p_theme));
    }
    if (e.target.mf) {
      mf_gold.push_back(*e.target.mf);
      mf_pred.push_back(mtlnet::argmax(tr.p_mf));
    }
  }
  Evaluation ev;
  if (!theme_gold.empty()) {
    ev.theme = classification_metrics(theme_gold, theme_pred, static_cast<int>(cfg.theme_classes));
  }
  if (!mf_gold.empty()) {
    ev.mf = classification_metrics(mf_gold, mf_pred, static_cast<int>(cfg.mf_classes));
  }
  return ev;
}

std::vector<std::string> common_test_ids(const corpus::Dataset& gold, std::uint64_t split_seed) {
  const corpus::IndexSplit s = corpus::split_indices(gold.size(), {}, split_seed);
  std::vector<std::string> ids;
  for (std::size_t i : s.test) ids.push_back(gold.records[i].id);
  return ids;
}

RunResult run(const corpus::Dataset& gold, const corpus::Dataset& weak, const ModelConfig& cfg,
              const StrategyConfig& sc, const embed::EmbeddingSource& source) {
  cfg.validate();
  sc.validate();
  if (gold.empty()) throw Error(ErrorCode::kInvalidArgument, "gold dataset is empty");
  require_labeled(gold, "gold");
  require_labeled(weak, "weak");

  RunResult out;
  out.strategy = sc.strategy;
  out.split_seed = sc.split_seed;
  out.model_seed = sc.model_seed;

  const std::vector<Example> gold_ex = encode(gold, cfg, source);
  std::vector<std::size_t> weak_keep;
  for (std::size_t i = 0; i < weak.size(); ++i) {
    if (gold.label_for(weak.records[i].id)) {
      ++out.weak_overlap_dropped;
    } else {
      weak_keep.push_back(i);
    }
  }
  if (out.weak_overlap_dropped > 0) {
    out.warnings.push_back(std::to_string(out.weak_overlap_dropped) +
                           " weak ads share an id with gold and were excluded");
  }
  const std::vector<Example> weak_ex =
      sc.strategy == Strategy::kFullySupervised ? std::vector<Example>{}
                                                : encode(corpus::select(weak, weak_keep), cfg, source);
  if ((sc.strategy == Strategy::kTwoStage1 || sc.strategy == Strategy::kTwoStage2) &&
      weak_ex.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "two-stage training needs weak examples");
  }

  const ModelParams init = mtlnet::init_params(cfg, sc.model_seed);
  std::vector<Example> train_set, val_set, test_set;
  FitResult final_fit;

  if (sc.strategy == Strategy::kHybrid) {
    const auto order = shuffled_indices(gold.size(), sc.split_seed);
    const std::size_t n_mix = floor_fraction(gold.size(), sc.gold_mix_fraction);
    std::vector<Example> pool = pick(gold_ex, range(0, n_mix, order));
    pool.insert(pool.end(), weak_ex.begin(), weak_ex.end());
    test_set = pick(gold_ex, range(n_mix, gold.size(), order));
    const auto [tr, va] = two_way(pool.size(), 0.8, sc.split_seed ^ kPoolShuffleSalt);
    train_set = pick(pool, tr);
    val_set = pick(pool, va);
    final_fit = fit(init, cfg, train_set, val_set, mtlnet::ParamScope::kAll, sc.model_seed,
                    &out.trace, &out.warnings);
  } else {
    const corpus::IndexSplit gs = corpus::split_indices(gold.size(), {}, sc.split_seed);
    train_set = pick(gold_ex, gs.train);
    val_set = pick(gold_ex, gs.val);
    test_set = pick(gold_ex, gs.test);
    if (sc.strategy == Strategy::kFullySupervised) {
      final_fit = fit(init, cfg, train_set, val_set, mtlnet::ParamScope::kAll, sc.model_seed,
                      &out.trace, &out.warnings);
    } else {
      const auto [wtr, wva] = two_way(weak_ex.size(), 0.8, sc.split_seed ^ kWeakSplitSalt);
      const std::vector<Example> weak_train = pick(weak_ex, wtr);
      const std::vector<Example> weak_val = pick(weak_ex, wva);
      FitResult stage1 = fit(init, cfg, weak_train, weak_val, mtlnet::ParamScope::kAll,
                             sc.model_seed, &out.trace, &out.warnings);
      if (sc.strategy == Strategy::kTwoStage2) {
        const auto mix_order = shuffled_indices(weak_ex.size(), sc.split_seed ^ kWeakMixSalt);
        const std::size_t n_mix = floor_fraction(weak_ex.size(), sc.weak_mix_fraction);
        for (std::size_t i = 0; i < n_mix; ++i) train_set.push_back(weak_ex[mix_order[i]]);
      }
      out.pretrained = stage1.params;
      final_fit = fit(stage1.params, cfg, train_set, val_set, mtlnet::ParamScope::kHeadsOnly,
                      sc.model_seed ^ kStageTwoSalt, &out.trace, &out.warnings);
      out.stage1 = std::move(stage1);
    }
  }

  for (const Example& e : test_set) {
    out.trace.test.insert(e.id);
    out.test_ids.push_back(e.id);
  }
  if (!out.trace.isolated()) {
    throw Error(ErrorCode::kInvalidArgument, "test ids leaked into training or validation");
  }
  out.metrics = evaluate(final_fit.params, cfg, test_set);
  out.epochs_run = final_fit.epochs_run;
  out.best_val_loss = final_fit.best_val_loss;
  out.curve = std::move(final_fit.curve);
  out.params = std::move(final_fit.params);
  return out;
}

RepeatResult repeat_runs(const corpus::Dataset& gold, const corpus::Dataset& weak,
                         const ModelConfig& cfg, const StrategyConfig& strategy, Strategy baseline,
                         std::size_t k, const embed::EmbeddingSource& source) {
  if (k < 2) throw Error(ErrorCode::kInvalidArgument, "repeat_runs needs k >= 2");
  RepeatResult out;
  for (std::size_t i = 0; i < k; ++i) {
    StrategyConfig sc = strategy;
    sc.model_seed = strategy.model_seed + i;
    out.runs.push_back(run(gold, weak, cfg, sc, source));
    sc.strategy = baseline;
    out.baseline_runs.push_back(run(gold, weak, cfg, sc, source));
  }
  using Getter = double (*)(const Evaluation&);
  const std::pair<const char*, Getter> metrics[] = {
      {"theme.accuracy", [](const Evaluation& e) { return e.theme.accuracy; }},
      {"theme.macro_f1", [](const Evaluation& e) { return e.theme.macro_f1; }},
      {"mf.accuracy", [](const Evaluation& e) { return e.mf.accuracy; }},
      {"mf.macro_f1", [](const Evaluation& e) { return e.mf.macro_f1; }},
  };
  for (const auto& [name, get] : metrics) {
    Comparison c;
    c.metric = name;
    for (std::size_t i = 0; i < k; ++i) {
      c.values.push_back(get(out.runs[i].metrics));
      c.baseline_values.push_back(get(out.baseline_runs[i].metrics));
    }
    for (std::size_t i = 0; i < k; ++i) {
      c.mean += c.values[i];
      c.baseline_mean += c.baseline_values[i];
    }
    c.mean /= static_cast<double>(k);
    c.baseline_mean /= static_cast<double>(k);
    try {
      c.paired_t = stats::paired_t(c.values, c.baseline_values);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate) throw;
    }
    out.comparisons.push_back(std::move(c));
  }
  return out;
}

}  // namespace adlens::train
