#pragma once

// Hypothesis tests used by the analyses: chi-square independence, Student
// and Welch t, paired t, augmented Dickey-Fuller and Granger causality,
// together with the distribution functions behind their p-values.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adlens/corpus.hpp"

namespace adlens::stats {

// ---- special functions -----------------------------------------------------

// Regularized lower and upper incomplete gamma, P(a, x) and Q(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);
// Regularized incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

double normal_cdf(double x);
double chi_square_sf(double x, double dof);
// P(|T| >= |t|) for Student's t with `dof` degrees of freedom.
double t_sf_two_sided(double t, double dof);
double f_sf(double f, double dof1, double dof2);

// ---- tests -----------------------------------------------------------------

struct TestResult {
  double statistic = 0.0;
  double dof = 0.0;
  std::optional<double> dof2;  // F tests
  double p_value = 1.0;
  std::vector<std::string> warnings;
};

struct ContingencyTable {
  std::vector<std::vector<std::int64_t>> counts;  // R x C
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
};

// Expected cells below 1 are rejected; below 5 add a warning.
TestResult chi_square(const ContingencyTable& table);

TestResult two_sample_t(std::span<const double> a, std::span<const double> b, bool equal_var);

// Student t of the sample mean against `mu`; throws kDegenerate on zero
// variance.
TestResult one_sample_t(std::span<const double> a, double mu);

// One-sample t on a - b. Throws kDegenerate when every difference is
// identical.
TestResult paired_t(std::span<const double> a, std::span<const double> b);

// ---- regression ------------------------------------------------------------

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd std_err;
  double ssr = 0.0;
  std::size_t nobs = 0;
};

// Throws kDegenerate when X is rank deficient or has no residual dof.
OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// ---- time series -----------------------------------------------------------

enum class LagSelect { kFixed, kAic };

struct AdfResult {
  TestResult test;
  std::size_t used_lag = 0;
  std::size_t nobs = 0;
};

// Approximate p-value for the constant-only Dickey-Fuller statistic.
double mackinnon_p(double tau);

// Regression of the first difference on the lagged level, `lag` lagged
// differences and a constant. With kAic every lag in 0..max_lag is fitted on
// a common sample and the lowest AIC wins (smaller lag on ties); the chosen
// lag is then refitted on the longest available sample.
AdfResult adf(std::span<const double> series, std::size_t max_lag, LagSelect select);

// Tests whether x Granger-causes y with `lag` lags of each.
TestResult granger(std::span<const double> x, std::span<const double> y, std::size_t lag);
// Same, after checking the two series cover identical dates.
TestResult granger(const corpus::TimeSeries& x, const corpus::TimeSeries& y, std::size_t lag);

}  // namespace adlens::stats
