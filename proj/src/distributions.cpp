#include "dynpanel/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dynpanel {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) throw std::domain_error("normal_quantile: probability outside (0, 1)");
  // Work in the lower tail, where erfc keeps relative accuracy.
  if (prob > 0.5) return -normal_quantile(1.0 - prob);
  double lo = -40.0, hi = 0.0;
  double x = -std::sqrt(-2.0 * std::log(prob));
  if (x < lo) x = lo;
  for (int it = 0; it < 200; ++it) {
    const double f = normal_cdf(x) - prob;
    if (f > 0.0) hi = x; else lo = x;
    const double d = normal_pdf(x);
    double next = d > 0.0 ? x - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-12 * (1.0 + std::abs(x))) return next;
    x = next;
  }
  return x;
}

namespace {

constexpr int kMaxTerms = 1000;
constexpr double kEps = 1e-16;

double gamma_series(double a, double x) {
  double term = 1.0 / a, sum = term;
  for (int n = 1; n < kMaxTerms; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_continued_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int n = 1; n < kMaxTerms; ++n) {
    const double an = -n * (n - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

void check_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw std::domain_error("incomplete gamma: need a > 0 and x >= 0");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - gamma_series(a, x) : gamma_continued_fraction(a, x);
}

double chi2_cdf(double x, double dof) { return x <= 0.0 ? 0.0 : regularized_gamma_p(0.5 * dof, 0.5 * x); }

double chi2_upper_tail(double x, double dof) {
  return x <= 0.0 ? 1.0 : regularized_gamma_q(0.5 * dof, 0.5 * x);
}

}  // namespace dynpanel
