#pragma once

// Multi-task Bi-LSTM classifier: a bidirectional LSTM over frozen token
// embeddings, masked mean pooling, one ReLU projection per task and a
// softmax output per task. Loss is the sum of the two cross-entropies plus
// gamma times the squared L2 norm of every parameter.
//
// All math is double precision. Gradients are exact reverse-mode
// (backpropagation through time for both directions).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "adlens/embed.hpp"
#include "adlens/labels.hpp"
#include "adlens/rng.hpp"

namespace adlens::mtlnet {

struct ModelConfig {
  std::size_t seq_len = 100;
  std::size_t embed_dim = 768;
  std::size_t hidden_dim = 256;   // per direction
  std::size_t repr_dim = 128;
  std::size_t theme_classes = kThemeCount;
  std::size_t mf_classes = kMfClassCount;
  double dropout = 0.2;
  double l2 = 1e-5;
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 100;
  std::size_t patience = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

// Gate rows are stacked [input; forget; cell; output], each hidden_dim tall.
struct LstmParams {
  Eigen::MatrixXd w_input;   // 4h x e
  Eigen::MatrixXd w_hidden;  // 4h x h
  Eigen::VectorXd bias;      // 4h
};

struct TaskHead {
  Eigen::MatrixXd w_repr;  // r x 2h
  Eigen::VectorXd b_repr;  // r
  Eigen::MatrixXd w_out;   // classes x r
  Eigen::VectorXd b_out;   // classes
};

struct ModelParams {
  LstmParams forward_lstm;
  LstmParams backward_lstm;
  TaskHead theme;
  TaskHead mf;

  static ModelParams zeros(const ModelConfig& cfg);
};

// Gradients share the parameter layout.
using Gradients = ModelParams;

struct TensorView {
  std::string_view name;
  double* data;
  Eigen::Index rows;
  Eigen::Index cols;
  bool encoder;  // part of the Bi-LSTM

  Eigen::Index size() const { return rows * cols; }
};

struct ConstTensorView {
  std::string_view name;
  const double* data;
  Eigen::Index rows;
  Eigen::Index cols;
  bool encoder;

  Eigen::Index size() const { return rows * cols; }
};

// Every tensor in declaration order (the checkpoint order).
std::vector<TensorView> tensors(ModelParams& params);
std::vector<ConstTensorView> tensors(const ModelParams& params);

std::size_t parameter_count(const ModelParams& params);
double squared_norm(const ModelParams& params);
bool shapes_match(const ModelParams& a, const ModelParams& b);
// Throws kInvalidArgument when any tensor's shape differs from the config.
void check_shapes(const ModelParams& params, const ModelConfig& cfg);

// Weights ~ U(-sqrt(1/fan_in), +sqrt(1/fan_in)); biases zero except the LSTM
// forget gate, which starts at one.
ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

struct LstmTrace {
  Eigen::MatrixXd gates;   // 4h x L, post-activation, by position
  Eigen::MatrixXd cells;   // h x L
  Eigen::MatrixXd hidden;  // h x L
};

struct ForwardTrace {
  std::size_t length = 0;   // real (unmasked) positions
  Eigen::MatrixXd states;   // 2h x L: [forward; backward] state per position
  Eigen::VectorXd pooled;   // 2h
  Eigen::VectorXd pooled_mask;  // inverted-dropout multipliers (ones at inference)
  Eigen::VectorXd z_theme, z_mf;  // pre-ReLU task projections
  Eigen::VectorXd r_theme, r_mf;  // task representations
  Eigen::VectorXd r_theme_mask, r_mf_mask;
  Eigen::VectorXd p_theme, p_mf;  // output distributions
  LstmTrace fwd;
  LstmTrace bwd;
};

// Dropout is applied to the pooled vector and to each task representation
// only when `dropout_rng` is non-null.
ForwardTrace forward(const ModelParams& params, const ModelConfig& cfg,
                     const embed::TokenSequence& seq, Rng* dropout_rng = nullptr);

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

struct LossReport {
  double l_theme = 0.0;
  double l_mf = 0.0;
  double l2 = 0.0;  // squared parameter norm
  double total = 0.0;
};

inline constexpr double kProbabilityFloor = 1e-30;

// Cross-entropy against one-hot targets; throws when a target is not one-hot.
LossReport joint_loss(const ForwardTrace& trace, const Eigen::VectorXd& theme_onehot,
                      const Eigen::VectorXd& mf_onehot, const ModelParams& params, double gamma);

// Per-task targets; a missing task contributes no loss for that example.
struct Target {
  std::optional<int> theme;
  std::optional<int> mf;
};

struct Example {
  std::string id;
  embed::TokenSequence seq;
  Target target;
};

using Batch = std::span<const Example* const>;

struct BatchGradient {
  Gradients grads;
  LossReport loss;
};

// Each task's loss is the mean over batch examples labelled for that task.
LossReport batch_loss(const ModelParams& params, const ModelConfig& cfg, Batch batch, double gamma,
                      Rng* dropout_rng = nullptr);

// Exact gradient of batch_loss(...).total with respect to every tensor.
BatchGradient backward(const ModelParams& params, const ModelConfig& cfg, Batch batch, double gamma,
                       Rng* dropout_rng = nullptr);

std::vector<const Example*> as_batch(std::span<const Example> examples);

// ---- optimisation ----------------------------------------------------------

enum class ParamScope { kAll, kHeadsOnly };

struct AdamState {
  ModelParams m;
  ModelParams v;

  static AdamState zeros_like(const ModelParams& params);
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamResult {
  ModelParams params;
  AdamState state;
};

// Step index t starts at 1. With kHeadsOnly, encoder tensors and their
// moments are returned untouched.
AdamResult adam_step(const ModelParams& params, const Gradients& grads, const AdamState& state,
                     double lr, std::size_t t, ParamScope scope = ParamScope::kAll,
                     const AdamOptions& options = {});

// ---- inference -------------------------------------------------------------

struct Prediction {
  Theme theme = Theme::kEncourageVaccination;
  MoralFoundation mf = MoralFoundation::kNone;
  Eigen::VectorXd p_theme;
  Eigen::VectorXd p_mf;
};

// Lowest index wins ties.
int argmax(const Eigen::VectorXd& v);

Prediction predict(const ModelParams& params, const ModelConfig& cfg, const embed::TokenSequence& seq);

// ---- verification ----------------------------------------------------------

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  Eigen::Index worst_index = 0;
  std::size_t coordinates = 0;
};

// |analytic - numeric| / max(|analytic|, |numeric|, floor)
inline constexpr double kGradCheckFloor = 1e-6;

// Central differences over every coordinate on a seeded random two-example
// batch; requires dropout == 0 and every dimension <= 8 (class counts
// excepted).
GradCheckReport grad_check(const ModelConfig& cfg, std::uint64_t seed, double epsilon = 1e-5,
                           double gamma = 1e-3);

ModelConfig toy_config();

}  // namespace adlens::mtlnet
