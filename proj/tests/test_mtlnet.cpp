#include <doctest.h>

#include <cmath>
#include <vector>

#include "adlens/error.hpp"
#include "adlens/mtlnet.hpp"
#include "adlens/rng.hpp"

using namespace adlens;
using namespace adlens::mtlnet;

namespace {

embed::TokenSequence random_seq(const ModelConfig& cfg, std::size_t real, Rng& rng) {
  embed::TokenSequence s;
  s.tokens = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg.embed_dim), static_cast<Eigen::Index>(cfg.seq_len));
  s.mask.assign(cfg.seq_len, false);
  for (std::size_t t = 0; t < real; ++t) {
    s.mask[t] = true;
    for (std::size_t d = 0; d < cfg.embed_dim; ++d) {
      s.tokens(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t)) = uniform_real(rng, -1, 1);
    }
  }
  return s;
}

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Scalar-loop LSTM: returns the hidden state after every processed step,
// in processing order.
std::vector<std::vector<double>> oracle_lstm(const LstmParams& p, const embed::TokenSequence& s, std::size_t len,
                                             bool reverse) {
  const auto h = static_cast<std::size_t>(p.w_hidden.cols());
  const auto e = static_cast<std::size_t>(p.w_input.cols());
  std::vector<double> hs(h, 0.0), cs(h, 0.0);
  std::vector<std::vector<double>> out;
  for (std::size_t step = 0; step < len; ++step) {
    const std::size_t t = reverse ? len - 1 - step : step;
    std::vector<double> z(4 * h, 0.0);
    for (std::size_t r = 0; r < 4 * h; ++r) {
      double acc = p.bias(static_cast<Eigen::Index>(r));
      for (std::size_t k = 0; k < e; ++k) {
        acc += p.w_input(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) *
               s.tokens(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t));
      }
      for (std::size_t k = 0; k < h; ++k) {
        acc += p.w_hidden(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) * hs[k];
      }
      z[r] = acc;
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double i = sig(z[j]);
      const double f = sig(z[h + j]);
      const double g = std::tanh(z[2 * h + j]);
      const double o = sig(z[3 * h + j]);
      cs[j] = f * cs[j] + i * g;
      hs[j] = o * std::tanh(cs[j]);
    }
    out.push_back(hs);
  }
  return out;
}

std::vector<double> oracle_head(const TaskHead& head, const std::vector<double>& pooled) {
  const auto r = static_cast<std::size_t>(head.w_repr.rows());
  const auto k = static_cast<std::size_t>(head.w_out.rows());
  std::vector<double> rep(r);
  for (std::size_t i = 0; i < r; ++i) {
    double acc = head.b_repr(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < pooled.size(); ++j) acc += head.w_repr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * pooled[j];
    rep[i] = std::max(0.0, acc);
  }
  std::vector<double> logits(k);
  double mx = -1e300;
  for (std::size_t i = 0; i < k; ++i) {
    double acc = head.b_out(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < r; ++j) acc += head.w_out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * rep[j];
    logits[i] = acc;
    mx = std::max(mx, acc);
  }
  double z = 0.0;
  for (double& l : logits) z += (l = std::exp(l - mx));
  for (double& l : logits) l /= z;
  return logits;
}

ModelConfig small() {
  ModelConfig c = toy_config();
  c.seq_len = 6;
  return c;
}

}  // namespace

TEST_CASE("forward matches a scalar-loop recurrence") {
  const ModelConfig cfg = small();
  Rng rng(11);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ModelParams p = init_params(cfg, seed);
    for (auto& t : tensors(p)) {
      for (Eigen::Index i = 0; i < t.size(); ++i) t.data[i] += uniform_real(rng, -0.3, 0.3);
    }
    for (std::size_t real : {std::size_t{1}, std::size_t{3}, cfg.seq_len}) {
      const auto seq = random_seq(cfg, real, rng);
      const auto tr = forward(p, cfg, seq);
      const auto f = oracle_lstm(p.forward_lstm, seq, real, false);
      const auto b = oracle_lstm(p.backward_lstm, seq, real, true);
      const std::size_t h = cfg.hidden_dim;
      std::vector<double> pooled(2 * h, 0.0);
      for (std::size_t s = 0; s < real; ++s) {
        for (std::size_t j = 0; j < h; ++j) {
          pooled[j] += f[s][j] / static_cast<double>(real);
          pooled[h + j] += b[s][j] / static_cast<double>(real);
        }
      }
      for (std::size_t j = 0; j < 2 * h; ++j) CHECK(tr.pooled(static_cast<Eigen::Index>(j)) == doctest::Approx(pooled[j]).epsilon(1e-12));
      const auto pt = oracle_head(p.theme, pooled);
      const auto pm = oracle_head(p.mf, pooled);
      for (std::size_t i = 0; i < pt.size(); ++i) CHECK(tr.p_theme(static_cast<Eigen::Index>(i)) == doctest::Approx(pt[i]).epsilon(1e-12));
      for (std::size_t i = 0; i < pm.size(); ++i) CHECK(tr.p_mf(static_cast<Eigen::Index>(i)) == doctest::Approx(pm[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("padding does not change the output") {
  const ModelConfig cfg = small();
  Rng rng(3);
  const ModelParams p = init_params(cfg, 1);
  auto seq = random_seq(cfg, 3, rng);
  const auto before = forward(p, cfg, seq);
  seq.tokens.col(5).setConstant(9.0);  // garbage in a pad slot
  const auto after = forward(p, cfg, seq);
  CHECK(before.p_theme.isApprox(after.p_theme, 0.0));
}

TEST_CASE("zero parameters give uniform outputs and log-class-count losses") {
  const ModelConfig cfg = small();
  Rng rng(1);
  const auto seq = random_seq(cfg, 4, rng);
  const ModelParams z = ModelParams::zeros(cfg);
  const auto tr = forward(z, cfg, seq);
  for (Eigen::Index i = 0; i < tr.p_theme.size(); ++i) CHECK(tr.p_theme(i) == 1.0 / 15.0);
  for (Eigen::Index i = 0; i < tr.p_mf.size(); ++i) CHECK(tr.p_mf(i) == 1.0 / 7.0);
  Eigen::VectorXd yt = Eigen::VectorXd::Zero(15);
  yt(4) = 1.0;
  Eigen::VectorXd ym = Eigen::VectorXd::Zero(7);
  ym(2) = 1.0;
  const auto loss = joint_loss(tr, yt, ym, z, 0.5);
  CHECK(std::abs(loss.l_theme - std::log(15.0)) < 1e-9);
  CHECK(std::abs(loss.l_mf - std::log(7.0)) < 1e-9);
  CHECK(loss.l2 == 0.0);
  CHECK(std::abs(loss.total - std::log(105.0)) < 1e-9);
  Eigen::VectorXd bad = Eigen::VectorXd::Zero(15);
  CHECK_THROWS_AS(joint_loss(tr, bad, ym, z, 0.0), Error);
}

TEST_CASE("softmax and argmax") {
  Eigen::VectorXd v(3);
  v << 1000.0, 1000.0, -1000.0;
  const auto s = softmax(v);
  CHECK(s(0) == doctest::Approx(0.5));
  CHECK(s(2) == doctest::Approx(0.0));
  CHECK(argmax(v) == 0);
}

TEST_CASE("gradient check passes on toy configs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = grad_check(toy_config(), seed);
    CHECK(r.max_relative_error < 1e-4);
    CHECK(r.coordinates == parameter_count(ModelParams::zeros(toy_config())));
  }
  ModelConfig big = toy_config();
  big.hidden_dim = 9;
  CHECK_THROWS_AS(grad_check(big, 0), Error);
  ModelConfig drop = toy_config();
  drop.dropout = 0.1;
  CHECK_THROWS_AS(grad_check(drop, 0), Error);
}

TEST_CASE("per-task loss averages over labelled examples only") {
  const ModelConfig cfg = small();
  Rng rng(5);
  const ModelParams p = init_params(cfg, 2);
  std::vector<Example> ex(2);
  ex[0] = {"a", random_seq(cfg, 3, rng), {3, 1}};
  ex[1] = {"b", random_seq(cfg, 2, rng), {std::nullopt, 4}};
  const auto both = batch_loss(p, cfg, as_batch(ex), 0.0);
  const std::vector<Example> first = {ex[0]};
  const auto one = batch_loss(p, cfg, as_batch(first), 0.0);
  CHECK(both.l_theme == doctest::Approx(one.l_theme).epsilon(1e-14));
  const auto tr1 = forward(p, cfg, ex[1].seq);
  CHECK(both.l_mf == doctest::Approx(0.5 * (one.l_mf - std::log(tr1.p_mf(4)))).epsilon(1e-12));
  ex[1].target.mf = 9;
  CHECK_THROWS_AS(batch_loss(p, cfg, as_batch(ex), 0.0), Error);
}

TEST_CASE("dropout masks only apply in training mode") {
  ModelConfig cfg = small();
  cfg.dropout = 0.5;
  Rng rng(8);
  const ModelParams p = init_params(cfg, 3);
  const auto seq = random_seq(cfg, 4, rng);
  const auto eval = forward(p, cfg, seq);
  CHECK(eval.pooled_mask.isOnes());
  Rng drop(1);
  const auto train = forward(p, cfg, seq, &drop);
  for (Eigen::Index i = 0; i < train.pooled_mask.size(); ++i) {
    const double m = train.pooled_mask(i);
    CHECK((m == 0.0 || m == doctest::Approx(2.0)));
  }
  CHECK_FALSE(train.pooled_mask.isOnes());
}

TEST_CASE("heads-only Adam leaves the encoder bit-identical") {
  const ModelConfig cfg = small();
  Rng rng(9);
  const ModelParams p = init_params(cfg, 4);
  std::vector<Example> ex = {{"a", random_seq(cfg, 3, rng), {1, 2}}, {"b", random_seq(cfg, 5, rng), {7, 0}}};
  const auto g = backward(p, cfg, as_batch(ex), cfg.l2);
  const auto heads = adam_step(p, g.grads, AdamState::zeros_like(p), 0.01, 1, ParamScope::kHeadsOnly);
  const auto all = adam_step(p, g.grads, AdamState::zeros_like(p), 0.01, 1, ParamScope::kAll);
  const auto before = tensors(p);
  const auto after = tensors(heads.params);
  const auto moved = tensors(all.params);
  for (std::size_t i = 0; i < before.size(); ++i) {
    const bool same = std::equal(before[i].data, before[i].data + before[i].size(), after[i].data);
    const bool all_same = std::equal(before[i].data, before[i].data + before[i].size(), moved[i].data);
    if (before[i].encoder) {
      CHECK(same);
      CHECK_FALSE(all_same);
    } else {
      CHECK_FALSE(same);
    }
  }
  CHECK_THROWS_AS(adam_step(p, g.grads, AdamState::zeros_like(p), 0.01, 0), Error);
}

TEST_CASE("a few Adam steps reduce the batch loss") {
  const ModelConfig cfg = small();
  Rng rng(10);
  ModelParams p = init_params(cfg, 5);
  std::vector<Example> ex;
  for (int i = 0; i < 4; ++i) ex.push_back({"e" + std::to_string(i), random_seq(cfg, 2 + static_cast<std::size_t>(i), rng), {i, i}});
  const auto batch = as_batch(ex);
  const double start = batch_loss(p, cfg, batch, 0.0).total;
  AdamState st = AdamState::zeros_like(p);
  for (std::size_t t = 1; t <= 50; ++t) {
    auto r = adam_step(p, backward(p, cfg, batch, 0.0).grads, st, 0.02, t);
    p = std::move(r.params);
    st = std::move(r.state);
  }
  CHECK(batch_loss(p, cfg, batch, 0.0).total < 0.5 * start);
}

TEST_CASE("invalid inputs are rejected") {
  const ModelConfig cfg = small();
  Rng rng(12);
  const ModelParams p = init_params(cfg, 0);
  auto seq = random_seq(cfg, 3, rng);
  seq.mask[1] = false;
  seq.mask[4] = true;
  CHECK_THROWS_AS(forward(p, cfg, seq), Error);
  ModelConfig other = cfg;
  other.seq_len = 5;
  CHECK_THROWS_AS(forward(p, other, random_seq(cfg, 2, rng)), Error);
  ModelParams bad = p;
  bad.theme.w_out(0, 0) = NAN;
  try {
    forward(bad, cfg, random_seq(cfg, 2, rng));
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumeric);
  }
  ModelConfig c = cfg;
  c.dropout = 1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = cfg;
  c.hidden_dim = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = cfg;
  c.repr_dim = 7;
  CHECK_THROWS_AS(check_shapes(p, c), Error);
  CHECK_NOTHROW(check_shapes(p, cfg));
}
