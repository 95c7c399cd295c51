#include <cmath>
#include <limits>

#include "adlens/error.hpp"
#include "adlens/stats.hpp"

namespace adlens::stats {
namespace {

constexpr int kMaxIterations = 1000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Q(a, x) by its continued fraction (modified Lentz); for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for I_x(a, b) (modified Lentz).
double beta_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace

double gamma_p(double a, double x) {
  require(a > 0.0 && x >= 0.0 && !std::isnan(x), "gamma_p needs a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return clamp01(gamma_p_series(a, x));
  return clamp01(1.0 - gamma_q_fraction(a, x));
}

double gamma_q(double a, double x) {
  require(a > 0.0 && x >= 0.0 && !std::isnan(x), "gamma_q needs a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return clamp01(1.0 - gamma_p_series(a, x));
  return clamp01(gamma_q_fraction(a, x));
}

double beta_inc(double a, double b, double x) {
  require(a > 0.0 && b > 0.0 && x >= 0.0 && x <= 1.0, "beta_inc needs a, b > 0 and x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return clamp01(front * beta_fraction(a, b, x) / a);
  return clamp01(1.0 - front * beta_fraction(b, a, 1.0 - x) / b);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double chi_square_sf(double x, double dof) {
  require(dof > 0.0, "chi-square dof must be > 0");
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * dof, 0.5 * x);
}

double t_sf_two_sided(double t, double dof) {
  require(dof > 0.0, "t dof must be > 0");
  if (std::isnan(t)) throw Error(ErrorCode::kNumeric, "t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  return beta_inc(0.5 * dof, 0.5, dof / (dof + t * t));
}

double f_sf(double f, double dof1, double dof2) {
  require(dof1 > 0.0 && dof2 > 0.0, "F dofs must be > 0");
  if (std::isnan(f)) throw Error(ErrorCode::kNumeric, "F statistic is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return beta_inc(0.5 * dof2, 0.5 * dof1, dof2 / (dof2 + dof1 * f));
}

}  // namespace adlens::stats
