#pragma once

namespace dynpanel {

double normal_pdf(double x);
double normal_cdf(double x);
/// Inverse of normal_cdf on (0, 1), Newton steps safeguarded by bisection.
double normal_quantile(double prob);

/// Regularized lower / upper incomplete gamma P(a, x), Q(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

double chi2_cdf(double x, double dof);
double chi2_upper_tail(double x, double dof);

}  // namespace dynpanel
