#pragma once

#include <vector>

#include "dynpanel/covariance.hpp"
#include "dynpanel/desparsify.hpp"
#include "dynpanel/nodewise.hpp"
#include "dynpanel/panel_model.hpp"

namespace dynpanel {

struct InferenceResult {
  Index index = 0;
  double estimate = 0.0;
  /// On the coefficient scale (already divided by sqrt(NT) or sqrt(T)).
  double std_error = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double level = 0.95;
  /// Zero estimated variance: the interval collapses to the estimate.
  bool degenerate = false;
};

struct WaldTest {
  std::vector<Index> H;
  Index h = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  VectorXd null_values;
};

struct ContrastStatistic {
  double value = 0.0;      // rho' S gamma~
  double variance = 0.0;   // rho' Theta Sigma Theta' rho
  double z = 0.0;
  double p_value = 1.0;    // two-sided
};

/// z_{1 - (1 - level)/2}
double two_sided_multiplier(double level);

/// estimate +- multiplier(level) * std_error
InferenceResult gaussian_interval(Index index, double estimate, double std_error, double level);

InferenceResult confidence_interval(Index h, const DebiasedEstimate& estimate, const NodewiseInverse& inv,
                                    const RobustCovariance& cov, const DesignSystem& design, double level);

/// [rho' S (gamma~ - gamma0)] / sqrt(rho' Theta Sigma Theta' rho) for unit-norm sparse rho.
/// `null_values` holds gamma0 at each term of rho, in term order.
ContrastStatistic contrast_statistic(const Contrast& rho, const std::vector<double>& null_values,
                                     const DebiasedEstimate& estimate, const NodewiseInverse& inv,
                                     const RobustCovariance& cov, const DesignSystem& design);

/// d' V^{-1} d by Cholesky; throws NumericalError(inversion_failure) if V is not positive definite.
double inverse_quadratic_form(const VectorXd& d, const MatrixXd& V);

WaldTest wald_chi2(const std::vector<Index>& H, const VectorXd& null_values, const DebiasedEstimate& estimate,
                   const NodewiseInverse& inv, const RobustCovariance& cov, const DesignSystem& design);

}  // namespace dynpanel
