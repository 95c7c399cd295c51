#include "adlens/mtlnet.hpp"

#include <cmath>
#include <sstream>

#include "adlens/error.hpp"

namespace adlens::mtlnet {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Index idx(std::size_t v) { return static_cast<Index>(v); }

VectorXd sigmoid(const VectorXd& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

void require_finite(const MatrixXd& m, std::string_view layer) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kNumeric, "non-finite values in layer " + std::string(layer));
  }
}

LstmParams lstm_zeros(std::size_t e, std::size_t h) {
  return {MatrixXd::Zero(idx(4 * h), idx(e)), MatrixXd::Zero(idx(4 * h), idx(h)),
          VectorXd::Zero(idx(4 * h))};
}

TaskHead head_zeros(std::size_t in, std::size_t r, std::size_t classes) {
  return {MatrixXd::Zero(idx(r), idx(in)), VectorXd::Zero(idx(r)), MatrixXd::Zero(idx(classes), idx(r)),
          VectorXd::Zero(idx(classes))};
}

void fill_uniform(MatrixXd& m, double bound, Rng& rng) {
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) m(i, j) = uniform_real(rng, -bound, bound);
  }
}

// Runs one direction over the first `length` positions. Positions are
// visited left-to-right, or right-to-left when `reverse`.
LstmTrace run_lstm(const LstmParams& p, const MatrixXd& x, std::size_t length, bool reverse) {
  const Index h = p.w_hidden.cols();
  const Index len = idx(length);
  LstmTrace tr{MatrixXd::Zero(4 * h, len), MatrixXd::Zero(h, len), MatrixXd::Zero(h, len)};
  if (length == 0) return tr;
  const MatrixXd input_proj = p.w_input * x.leftCols(len);
  VectorXd h_prev = VectorXd::Zero(h);
  VectorXd c_prev = VectorXd::Zero(h);
  for (Index s = 0; s < len; ++s) {
    const Index t = reverse ? len - 1 - s : s;
    const VectorXd a = input_proj.col(t) + p.w_hidden * h_prev + p.bias;
    const VectorXd i = sigmoid(a.segment(0, h));
    const VectorXd f = sigmoid(a.segment(h, h));
    const VectorXd g = a.segment(2 * h, h).array().tanh().matrix();
    const VectorXd o = sigmoid(a.segment(3 * h, h));
    const VectorXd c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
    const VectorXd hh = o.cwiseProduct(c.array().tanh().matrix());
    tr.gates.col(t) << i, f, g, o;
    tr.cells.col(t) = c;
    tr.hidden.col(t) = hh;
    h_prev = hh;
    c_prev = c;
  }
  return tr;
}

// Accumulates this direction's parameter gradients given dLoss/dh at every
// position (d_hidden, h x length).
void backprop_lstm(const LstmParams& p, const LstmTrace& tr, const MatrixXd& x, std::size_t length,
                   bool reverse, const MatrixXd& d_hidden, LstmParams& grad) {
  if (length == 0) return;
  const Index h = p.w_hidden.cols();
  const Index len = idx(length);
  MatrixXd d_pre(4 * h, len);
  MatrixXd h_prev_cols = MatrixXd::Zero(h, len);
  VectorXd dh_next = VectorXd::Zero(h);
  VectorXd dc_next = VectorXd::Zero(h);
  for (Index s = len - 1; s >= 0; --s) {
    const Index t = reverse ? len - 1 - s : s;
    const bool has_prev = s > 0;
    const Index prev = reverse ? t + 1 : t - 1;
    const auto gates = tr.gates.col(t);
    const VectorXd i = gates.segment(0, h);
    const VectorXd f = gates.segment(h, h);
    const VectorXd g = gates.segment(2 * h, h);
    const VectorXd o = gates.segment(3 * h, h);
    const VectorXd tanh_c = tr.cells.col(t).array().tanh().matrix();
    const VectorXd c_prev = has_prev ? VectorXd(tr.cells.col(prev)) : VectorXd::Zero(h);
    if (has_prev) h_prev_cols.col(t) = tr.hidden.col(prev);

    const VectorXd dh = d_hidden.col(t) + dh_next;
    const VectorXd d_o = dh.cwiseProduct(tanh_c);
    const VectorXd dc =
        dh.cwiseProduct(o).cwiseProduct((1.0 - tanh_c.array().square()).matrix()) + dc_next;
    const VectorXd d_i = dc.cwiseProduct(g);
    const VectorXd d_g = dc.cwiseProduct(i);
    const VectorXd d_f = dc.cwiseProduct(c_prev);
    dc_next = dc.cwiseProduct(f);

    auto col = d_pre.col(t);
    col.segment(0, h) = d_i.array() * i.array() * (1.0 - i.array());
    col.segment(h, h) = d_f.array() * f.array() * (1.0 - f.array());
    col.segment(2 * h, h) = d_g.array() * (1.0 - g.array().square());
    col.segment(3 * h, h) = d_o.array() * o.array() * (1.0 - o.array());
    dh_next = p.w_hidden.transpose() * col;
  }
  grad.w_input.noalias() += d_pre * x.leftCols(len).transpose();
  grad.w_hidden.noalias() += d_pre * h_prev_cols.transpose();
  grad.bias += d_pre.rowwise().sum();
}

VectorXd dropout_mask(Index size, double rate, Rng* rng) {
  VectorXd mask = VectorXd::Ones(size);
  if (!rng || rate <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Index i = 0; i < size; ++i) mask(i) = uniform01(*rng) < rate ? 0.0 : keep_scale;
  return mask;
}

VectorXd one_hot(int cls, std::size_t classes) {
  VectorXd v = VectorXd::Zero(idx(classes));
  v(cls) = 1.0;
  return v;
}

double cross_entropy(const VectorXd& p, const VectorXd& target) {
  double loss = 0.0;
  for (Index i = 0; i < p.size(); ++i) {
    if (target(i) != 0.0) loss -= target(i) * std::log(std::max(p(i), kProbabilityFloor));
  }
  return loss;
}

void check_onehot(const VectorXd& v, Index classes, std::string_view task) {
  bool ok = v.size() == classes;
  int ones = 0;
  for (Index i = 0; ok && i < v.size(); ++i) {
    if (v(i) == 1.0) {
      ++ones;
    } else if (v(i) != 0.0) {
      ok = false;
    }
  }
  if (!ok || ones != 1) {
    throw Error(ErrorCode::kInvalidArgument, "gold " + std::string(task) + " target is not one-hot");
  }
}

void check_target(const Target& t, const ModelConfig& cfg) {
  if (t.theme && (*t.theme < 0 || *t.theme >= static_cast<int>(cfg.theme_classes))) {
    throw Error(ErrorCode::kInvalidArgument, "theme target outside class range");
  }
  if (t.mf && (*t.mf < 0 || *t.mf >= static_cast<int>(cfg.mf_classes))) {
    throw Error(ErrorCode::kInvalidArgument, "mf target outside class range");
  }
}

struct TaskCounts {
  double theme = 0.0;
  double mf = 0.0;
};

TaskCounts count_targets(Batch batch, const ModelConfig& cfg) {
  TaskCounts c;
  for (const Example* ex : batch) {
    check_target(ex->target, cfg);
    if (ex->target.theme) c.theme += 1.0;
    if (ex->target.mf) c.mf += 1.0;
  }
  return c;
}

void add_scaled(ModelParams& dst, const ModelParams& src, double scale) {
  auto d = tensors(dst);
  const auto s = tensors(src);
  for (std::size_t k = 0; k < d.size(); ++k) {
    for (Index i = 0; i < d[k].size(); ++i) d[k].data[i] += scale * s[k].data[i];
  }
}

// Head backward for one example; returns dLoss/d(dropped pooled input).
VectorXd backprop_head(const TaskHead& head, const VectorXd& pooled_in, const VectorXd& z,
                       const VectorXd& r, const VectorXd& r_mask, const VectorXd& d_logits,
                       TaskHead& grad) {
  const VectorXd r_dropped = r.cwiseProduct(r_mask);
  grad.w_out.noalias() += d_logits * r_dropped.transpose();
  grad.b_out += d_logits;
  VectorXd dz = (head.w_out.transpose() * d_logits).cwiseProduct(r_mask);
  for (Index i = 0; i < dz.size(); ++i) {
    if (z(i) <= 0.0) dz(i) = 0.0;
  }
  grad.w_repr.noalias() += dz * pooled_in.transpose();
  grad.b_repr += dz;
  return head.w_repr.transpose() * dz;
}

}  // namespace

void ModelConfig::validate() const {
  if (seq_len == 0 || embed_dim == 0 || hidden_dim == 0 || repr_dim == 0 || theme_classes == 0 ||
      mf_classes == 0) {
    throw Error(ErrorCode::kInvalidArgument, "model dimensions must all be >= 1");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dropout must lie in [0, 1)");
  }
  if (!(l2 >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "l2 coefficient must be >= 0");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "learning rate must be > 0");
  if (batch_size == 0 || max_epochs == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batch size and max epochs must be >= 1");
  }
}

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
  const std::size_t e = cfg.embed_dim;
  const std::size_t h = cfg.hidden_dim;
  return {lstm_zeros(e, h), lstm_zeros(e, h), head_zeros(2 * h, cfg.repr_dim, cfg.theme_classes),
          head_zeros(2 * h, cfg.repr_dim, cfg.mf_classes)};
}

std::vector<TensorView> tensors(ModelParams& p) {
  std::vector<TensorView> out;
  const auto add_m = [&](std::string_view name, MatrixXd& m, bool enc) {
    out.push_back({name, m.data(), m.rows(), m.cols(), enc});
  };
  const auto add_v = [&](std::string_view name, VectorXd& v, bool enc) {
    out.push_back({name, v.data(), v.size(), 1, enc});
  };
  add_m("lstm_fwd.w_input", p.forward_lstm.w_input, true);
  add_m("lstm_fwd.w_hidden", p.forward_lstm.w_hidden, true);
  add_v("lstm_fwd.bias", p.forward_lstm.bias, true);
  add_m("lstm_bwd.w_input", p.backward_lstm.w_input, true);
  add_m("lstm_bwd.w_hidden", p.backward_lstm.w_hidden, true);
  add_v("lstm_bwd.bias", p.backward_lstm.bias, true);
  add_m("theme.w_repr", p.theme.w_repr, false);
  add_v("theme.b_repr", p.theme.b_repr, false);
  add_m("theme.w_out", p.theme.w_out, false);
  add_v("theme.b_out", p.theme.b_out, false);
  add_m("mf.w_repr", p.mf.w_repr, false);
  add_v("mf.b_repr", p.mf.b_repr, false);
  add_m("mf.w_out", p.mf.w_out, false);
  add_v("mf.b_out", p.mf.b_out, false);
  return out;
}

std::vector<ConstTensorView> tensors(const ModelParams& p) {
  std::vector<ConstTensorView> out;
  for (const TensorView& t : tensors(const_cast<ModelParams&>(p))) {
    out.push_back({t.name, t.data, t.rows, t.cols, t.encoder});
  }
  return out;
}

std::size_t parameter_count(const ModelParams& params) {
  std::size_t n = 0;
  for (const auto& t : tensors(params)) n += static_cast<std::size_t>(t.size());
  return n;
}

double squared_norm(const ModelParams& params) {
  double s = 0.0;
  for (const auto& t : tensors(params)) {
    for (Index i = 0; i < t.size(); ++i) s += t.data[i] * t.data[i];
  }
  return s;
}

bool shapes_match(const ModelParams& a, const ModelParams& b) {
  const auto ta = tensors(a);
  const auto tb = tensors(b);
  for (std::size_t k = 0; k < ta.size(); ++k) {
    if (ta[k].rows != tb[k].rows || ta[k].cols != tb[k].cols) return false;
  }
  return true;
}

void check_shapes(const ModelParams& params, const ModelConfig& cfg) {
  if (!shapes_match(params, ModelParams::zeros(cfg))) {
    throw Error(ErrorCode::kInvalidArgument, "parameter shapes do not match the model config");
  }
}

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ModelParams p = ModelParams::zeros(cfg);
  Rng rng(seed);
  const double h = static_cast<double>(cfg.hidden_dim);
  for (LstmParams* lstm : {&p.forward_lstm, &p.backward_lstm}) {
    // The gate pre-activation sums input and recurrent terms, so both
    // matrices share the combined fan-in.
    const double bound = std::sqrt(1.0 / (static_cast<double>(cfg.embed_dim) + h));
    fill_uniform(lstm->w_input, bound, rng);
    fill_uniform(lstm->w_hidden, bound, rng);
    lstm->bias.segment(idx(cfg.hidden_dim), idx(cfg.hidden_dim)).setOnes();
  }
  for (TaskHead* head : {&p.theme, &p.mf}) {
    fill_uniform(head->w_repr, std::sqrt(1.0 / (2.0 * h)), rng);
    fill_uniform(head->w_out, std::sqrt(1.0 / static_cast<double>(cfg.repr_dim)), rng);
  }
  return p;
}

VectorXd softmax(const VectorXd& logits) {
  const double m = logits.maxCoeff();
  VectorXd e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

ForwardTrace forward(const ModelParams& params, const ModelConfig& cfg,
                     const embed::TokenSequence& seq, Rng* dropout_rng) {
  if (seq.size() != cfg.seq_len) {
    throw Error(ErrorCode::kInvalidArgument, "sequence length " + std::to_string(seq.size()) +
                                                 " differs from configured " +
                                                 std::to_string(cfg.seq_len));
  }
  if (seq.dim() != cfg.embed_dim) {
    throw Error(ErrorCode::kInvalidArgument, "token dim " + std::to_string(seq.dim()) +
                                                 " differs from configured " +
                                                 std::to_string(cfg.embed_dim));
  }
  const std::size_t length = seq.real_count();
  for (std::size_t i = 0; i < length; ++i) {
    if (!seq.mask[i]) {
      throw Error(ErrorCode::kInvalidArgument, "token mask must mark a prefix of real positions");
    }
  }
  const Index h = idx(cfg.hidden_dim);
  ForwardTrace tr;
  tr.length = length;
  tr.fwd = run_lstm(params.forward_lstm, seq.tokens, length, false);
  tr.bwd = run_lstm(params.backward_lstm, seq.tokens, length, true);
  tr.states.resize(2 * h, idx(length));
  tr.states.topRows(h) = tr.fwd.hidden;
  tr.states.bottomRows(h) = tr.bwd.hidden;
  require_finite(tr.states, "bilstm");
  tr.pooled = length > 0 ? VectorXd(tr.states.rowwise().mean()) : VectorXd::Zero(2 * h);

  const double rate = dropout_rng ? cfg.dropout : 0.0;
  tr.pooled_mask = dropout_mask(2 * h, rate, dropout_rng);
  const VectorXd pooled_in = tr.pooled.cwiseProduct(tr.pooled_mask);

  tr.z_theme = params.theme.w_repr * pooled_in + params.theme.b_repr;
  tr.r_theme = tr.z_theme.cwiseMax(0.0);
  tr.z_mf = params.mf.w_repr * pooled_in + params.mf.b_repr;
  tr.r_mf = tr.z_mf.cwiseMax(0.0);
  require_finite(tr.r_theme, "theme_repr");
  require_finite(tr.r_mf, "mf_repr");
  tr.r_theme_mask = dropout_mask(tr.r_theme.size(), rate, dropout_rng);
  tr.r_mf_mask = dropout_mask(tr.r_mf.size(), rate, dropout_rng);

  tr.p_theme = softmax(params.theme.w_out * tr.r_theme.cwiseProduct(tr.r_theme_mask) + params.theme.b_out);
  tr.p_mf = softmax(params.mf.w_out * tr.r_mf.cwiseProduct(tr.r_mf_mask) + params.mf.b_out);
  require_finite(tr.p_theme, "theme_output");
  require_finite(tr.p_mf, "mf_output");
  return tr;
}

LossReport joint_loss(const ForwardTrace& trace, const VectorXd& theme_onehot,
                      const VectorXd& mf_onehot, const ModelParams& params, double gamma) {
  check_onehot(theme_onehot, trace.p_theme.size(), "theme");
  check_onehot(mf_onehot, trace.p_mf.size(), "mf");
  LossReport r;
  r.l_theme = cross_entropy(trace.p_theme, theme_onehot);
  r.l_mf = cross_entropy(trace.p_mf, mf_onehot);
  r.l2 = squared_norm(params);
  r.total = r.l_theme + r.l_mf + gamma * r.l2;
  return r;
}

std::vector<const Example*> as_batch(std::span<const Example> examples) {
  std::vector<const Example*> out;
  out.reserve(examples.size());
  for (const Example& e : examples) out.push_back(&e);
  return out;
}

LossReport batch_loss(const ModelParams& params, const ModelConfig& cfg, Batch batch, double gamma,
                      Rng* dropout_rng) {
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  const TaskCounts counts = count_targets(batch, cfg);
  LossReport r;
  for (const Example* ex : batch) {
    const ForwardTrace tr = forward(params, cfg, ex->seq, dropout_rng);
    if (ex->target.theme) {
      r.l_theme += cross_entropy(tr.p_theme, one_hot(*ex->target.theme, cfg.theme_classes));
    }
    if (ex->target.mf) r.l_mf += cross_entropy(tr.p_mf, one_hot(*ex->target.mf, cfg.mf_classes));
  }
  if (counts.theme > 0.0) r.l_theme /= counts.theme;
  if (counts.mf > 0.0) r.l_mf /= counts.mf;
  r.l2 = squared_norm(params);
  r.total = r.l_theme + r.l_mf + gamma * r.l2;
  return r;
}

BatchGradient backward(const ModelParams& params, const ModelConfig& cfg, Batch batch, double gamma,
                       Rng* dropout_rng) {
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  const TaskCounts counts = count_targets(batch, cfg);
  const Index h = idx(cfg.hidden_dim);
  BatchGradient out{ModelParams::zeros(cfg), {}};
  Gradients& g = out.grads;
  for (const Example* ex : batch) {
    const ForwardTrace tr = forward(params, cfg, ex->seq, dropout_rng);
    const VectorXd pooled_in = tr.pooled.cwiseProduct(tr.pooled_mask);
    VectorXd d_pooled_in = VectorXd::Zero(2 * h);
    if (ex->target.theme) {
      const VectorXd y = one_hot(*ex->target.theme, cfg.theme_classes);
      out.loss.l_theme += cross_entropy(tr.p_theme, y) / counts.theme;
      const VectorXd d_logits = (tr.p_theme - y) / counts.theme;
      d_pooled_in += backprop_head(params.theme, pooled_in, tr.z_theme, tr.r_theme, tr.r_theme_mask,
                                   d_logits, g.theme);
    }
    if (ex->target.mf) {
      const VectorXd y = one_hot(*ex->target.mf, cfg.mf_classes);
      out.loss.l_mf += cross_entropy(tr.p_mf, y) / counts.mf;
      const VectorXd d_logits = (tr.p_mf - y) / counts.mf;
      d_pooled_in +=
          backprop_head(params.mf, pooled_in, tr.z_mf, tr.r_mf, tr.r_mf_mask, d_logits, g.mf);
    }
    if (tr.length == 0) continue;
    const VectorXd d_pooled = d_pooled_in.cwiseProduct(tr.pooled_mask);
    const Index len = idx(tr.length);
    const MatrixXd d_states =
        (d_pooled / static_cast<double>(tr.length)).replicate(1, len);
    backprop_lstm(params.forward_lstm, tr.fwd, ex->seq.tokens, tr.length, false,
                  d_states.topRows(h), g.forward_lstm);
    backprop_lstm(params.backward_lstm, tr.bwd, ex->seq.tokens, tr.length, true,
                  d_states.bottomRows(h), g.backward_lstm);
  }
  out.loss.l2 = squared_norm(params);
  out.loss.total = out.loss.l_theme + out.loss.l_mf + gamma * out.loss.l2;
  add_scaled(g, params, 2.0 * gamma);
  for (const auto& t : tensors(g)) {
    for (Index i = 0; i < t.size(); ++i) {
      if (!std::isfinite(t.data[i])) {
        throw Error(ErrorCode::kNumeric, "non-finite gradient in " + std::string(t.name));
      }
    }
  }
  return out;
}

AdamState AdamState::zeros_like(const ModelParams& params) {
  AdamState s{params, params};
  for (auto* p : {&s.m, &s.v}) {
    for (auto& t : tensors(*p)) std::fill(t.data, t.data + t.size(), 0.0);
  }
  return s;
}

AdamResult adam_step(const ModelParams& params, const Gradients& grads, const AdamState& state,
                     double lr, std::size_t t, ParamScope scope, const AdamOptions& options) {
  if (t == 0) throw Error(ErrorCode::kInvalidArgument, "Adam step index starts at 1");
  if (!shapes_match(params, grads) || !shapes_match(params, state.m) ||
      !shapes_match(params, state.v)) {
    throw Error(ErrorCode::kInvalidArgument, "Adam inputs have mismatched shapes");
  }
  AdamResult out{params, state};
  auto p = tensors(out.params);
  auto m = tensors(out.state.m);
  auto v = tensors(out.state.v);
  const auto g = tensors(grads);
  const double td = static_cast<double>(t);
  const double bias1 = 1.0 - std::pow(options.beta1, td);
  const double bias2 = 1.0 - std::pow(options.beta2, td);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (scope == ParamScope::kHeadsOnly && p[k].encoder) continue;
    for (Index i = 0; i < p[k].size(); ++i) {
      const double gi = g[k].data[i];
      m[k].data[i] = options.beta1 * m[k].data[i] + (1.0 - options.beta1) * gi;
      v[k].data[i] = options.beta2 * v[k].data[i] + (1.0 - options.beta2) * gi * gi;
      const double m_hat = m[k].data[i] / bias1;
      const double v_hat = v[k].data[i] / bias2;
      p[k].data[i] -= lr * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
  return out;
}

int argmax(const VectorXd& v) {
  int best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = static_cast<int>(i);
  }
  return best;
}

Prediction predict(const ModelParams& params, const ModelConfig& cfg, const embed::TokenSequence& seq) {
  if (cfg.theme_classes != kThemeCount || cfg.mf_classes != kMfClassCount) {
    throw Error(ErrorCode::kInvalidArgument, "predict needs 15 theme and 7 mf classes");
  }
  const ForwardTrace tr = forward(params, cfg, seq, nullptr);
  Prediction p;
  p.theme = theme_from_index(argmax(tr.p_theme));
  p.mf = mf_from_index(argmax(tr.p_mf));
  p.p_theme = tr.p_theme;
  p.p_mf = tr.p_mf;
  return p;
}

ModelConfig toy_config() {
  ModelConfig cfg;
  cfg.seq_len = 4;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 4;
  cfg.repr_dim = 5;
  cfg.dropout = 0.0;
  cfg.l2 = 1e-3;
  cfg.batch_size = 2;
  return cfg;
}

GradCheckReport grad_check(const ModelConfig& cfg, std::uint64_t seed, double epsilon, double gamma) {
  cfg.validate();
  if (cfg.dropout != 0.0) throw Error(ErrorCode::kInvalidArgument, "grad_check needs dropout = 0");
  for (std::size_t d : {cfg.seq_len, cfg.embed_dim, cfg.hidden_dim, cfg.repr_dim}) {
    if (d > 8) throw Error(ErrorCode::kInvalidArgument, "grad_check is for toy configs (dims <= 8)");
  }
  Rng rng(seed);
  ModelParams params = init_params(cfg, seed);
  // Non-zero biases so every path carries a generic gradient.
  for (auto& t : tensors(params)) {
    if (t.cols == 1) {
      for (Index i = 0; i < t.size(); ++i) t.data[i] += uniform_real(rng, -0.2, 0.2);
    }
  }
  std::vector<Example> examples(2);
  for (std::size_t e = 0; e < examples.size(); ++e) {
    Example& ex = examples[e];
    ex.id = "gradcheck-" + std::to_string(e);
    ex.seq.tokens = MatrixXd::Zero(idx(cfg.embed_dim), idx(cfg.seq_len));
    // First example fills the sequence; the second leaves one pad slot.
    const std::size_t length = e == 0 || cfg.seq_len == 1 ? cfg.seq_len : cfg.seq_len - 1;
    ex.seq.mask.assign(cfg.seq_len, false);
    for (std::size_t pos = 0; pos < length; ++pos) {
      ex.seq.mask[pos] = true;
      for (Index i = 0; i < idx(cfg.embed_dim); ++i) ex.seq.tokens(i, idx(pos)) = uniform_real(rng, -1.0, 1.0);
    }
    ex.target.theme = static_cast<int>(uniform_index(rng, cfg.theme_classes));
    ex.target.mf = static_cast<int>(uniform_index(rng, cfg.mf_classes));
  }
  const auto batch = as_batch(examples);
  const BatchGradient analytic = backward(params, cfg, batch, gamma);
  const auto grads = tensors(analytic.grads);
  auto views = tensors(params);

  GradCheckReport report;
  for (std::size_t k = 0; k < views.size(); ++k) {
    for (Index i = 0; i < views[k].size(); ++i) {
      double& theta = views[k].data[i];
      const double saved = theta;
      theta = saved + epsilon;
      const double up = batch_loss(params, cfg, batch, gamma).total;
      theta = saved - epsilon;
      const double down = batch_loss(params, cfg, batch, gamma).total;
      theta = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double exact = grads[k].data[i];
      const double denom = std::max({std::abs(exact), std::abs(numeric), kGradCheckFloor});
      const double rel = std::abs(exact - numeric) / denom;
      ++report.coordinates;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_tensor = std::string(views[k].name);
        report.worst_index = i;
      }
    }
  }
  return report;
}

}  // namespace adlens::mtlnet
