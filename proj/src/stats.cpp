#include "adlens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adlens/error.hpp"

namespace adlens::stats {
namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // sample variance (n - 1)
};

Moments moments(std::span<const double> v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

void require_finite(std::span<const double> v, const char* name) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(name) + " contains non-finite values");
    }
  }
}

}  // namespace

TestResult chi_square(const ContingencyTable& table) {
  const std::size_t rows = table.counts.size();
  if (rows < 2) throw Error(ErrorCode::kInvalidArgument, "contingency table needs >= 2 rows");
  const std::size_t cols = table.counts.front().size();
  if (cols < 2) throw Error(ErrorCode::kInvalidArgument, "contingency table needs >= 2 columns");
  std::vector<double> row_total(rows, 0.0);
  std::vector<double> col_total(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (table.counts[i].size() != cols) {
      throw Error(ErrorCode::kInvalidArgument, "contingency table rows differ in length");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      const auto c = table.counts[i][j];
      if (c < 0) throw Error(ErrorCode::kInvalidArgument, "negative contingency count");
      row_total[i] += static_cast<double>(c);
      col_total[j] += static_cast<double>(c);
      total += static_cast<double>(c);
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_total[i] == 0.0) {
      throw Error(ErrorCode::kDegenerate, "contingency row " + std::to_string(i) + " is all zero");
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (col_total[j] == 0.0) {
      throw Error(ErrorCode::kDegenerate, "contingency column " + std::to_string(j) + " is all zero");
    }
  }
  TestResult r;
  std::size_t small = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double expected = row_total[i] * col_total[j] / total;
      if (expected < 1.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "expected count below 1 in cell (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");
      }
      if (expected < 5.0) ++small;
      const double diff = static_cast<double>(table.counts[i][j]) - expected;
      r.statistic += diff * diff / expected;
    }
  }
  if (small > 0) {
    r.warnings.push_back(std::to_string(small) + " expected cell(s) below 5");
  }
  r.dof = static_cast<double>((rows - 1) * (cols - 1));
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

TestResult two_sample_t(std::span<const double> a, std::span<const double> b, bool equal_var) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "t-test needs at least 2 observations per sample");
  }
  require_finite(a, "sample a");
  require_finite(b, "sample b");
  const Moments ma = moments(a);
  const Moments mb = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  TestResult r;
  double se2 = 0.0;
  if (equal_var) {
    const double pooled = ((na - 1.0) * ma.var + (nb - 1.0) * mb.var) / (na + nb - 2.0);
    se2 = pooled * (1.0 / na + 1.0 / nb);
    r.dof = na + nb - 2.0;
  } else {
    const double va = ma.var / na;
    const double vb = mb.var / nb;
    se2 = va + vb;
    if (se2 > 0.0) r.dof = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  }
  if (!(se2 > 0.0)) throw Error(ErrorCode::kDegenerate, "degenerate: zero pooled variance");
  r.statistic = (ma.mean - mb.mean) / std::sqrt(se2);
  r.p_value = t_sf_two_sided(r.statistic, r.dof);
  return r;
}

TestResult one_sample_t(std::span<const double> a, double mu) {
  if (a.size() < 2) throw Error(ErrorCode::kInvalidArgument, "t-test needs at least 2 observations");
  require_finite(a, "sample");
  const Moments m = moments(a);
  // Spread at rounding level (e.g. differences of a and a + c) counts as zero.
  double scale = 0.0;
  double spread = 0.0;
  for (double x : a) {
    scale = std::max(scale, std::abs(x));
    spread = std::max(spread, std::abs(x - m.mean));
  }
  if (!(m.var > 0.0) || spread <= 64.0 * std::numeric_limits<double>::epsilon() * scale) {
    throw Error(ErrorCode::kDegenerate, "degenerate: zero sample variance");
  }
  TestResult r;
  const double n = static_cast<double>(a.size());
  r.statistic = (m.mean - mu) / std::sqrt(m.var / n);
  r.dof = n - 1.0;
  r.p_value = t_sf_two_sided(r.statistic, r.dof);
  return r;
}

TestResult paired_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "paired t-test needs equal lengths >= 2");
  }
  require_finite(a, "sample a");
  require_finite(b, "sample b");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  try {
    return one_sample_t(d, 0.0);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerate) throw;
    throw Error(ErrorCode::kDegenerate, "degenerate: zero variance of differences");
  }
}

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw Error(ErrorCode::kInvalidArgument, "OLS dimension mismatch");
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (n <= k) throw Error(ErrorCode::kDegenerate, "OLS has no residual degrees of freedom");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < k) throw Error(ErrorCode::kDegenerate, "singular regression matrix");
  OlsFit fit;
  fit.beta = qr.solve(y);
  fit.ssr = (y - x * fit.beta).squaredNorm();
  fit.nobs = static_cast<std::size_t>(n);
  // X P = Q R, so (X'X)^-1 = P R^-1 R^-T P'.
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd xtx_inv =
      qr.colsPermutation() * (r_inv * r_inv.transpose()) * qr.colsPermutation().transpose();
  const double sigma2 = fit.ssr / static_cast<double>(n - k);
  fit.std_err = (sigma2 * xtx_inv.diagonal().array()).sqrt().matrix();
  return fit;
}

}  // namespace adlens::stats
