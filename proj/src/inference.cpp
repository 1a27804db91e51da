#include "dynpanel/inference.hpp"

#include <cmath>

#include "dynpanel/distributions.hpp"
#include "dynpanel/errors.hpp"

namespace dynpanel {

double two_sided_multiplier(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InputError("confidence level must lie in (0, 1)");
  return normal_quantile(1.0 - (1.0 - level) / 2.0);
}

InferenceResult gaussian_interval(Index index, double estimate, double std_error, double level) {
  const double z = two_sided_multiplier(level);
  InferenceResult r;
  r.index = index;
  r.estimate = estimate;
  r.std_error = std_error;
  r.level = level;
  r.ci_lower = estimate - z * std_error;
  r.ci_upper = estimate + z * std_error;
  r.degenerate = !(std_error > 0.0);
  return r;
}

InferenceResult confidence_interval(Index h, const DebiasedEstimate& estimate, const NodewiseInverse& inv,
                                    const RobustCovariance& cov, const DesignSystem& design, double level) {
  const double var = asy_variance(Contrast::basis(h), inv, cov);
  return gaussian_interval(h, estimate.at(h), std::sqrt(var) / design.S_diag()(h), level);
}

ContrastStatistic contrast_statistic(const Contrast& rho, const std::vector<double>& null_values,
                                     const DebiasedEstimate& estimate, const NodewiseInverse& inv,
                                     const RobustCovariance& cov, const DesignSystem& design) {
  if (null_values.size() != rho.terms.size()) throw InputError("contrast: one null value per term required");
  ContrastStatistic out;
  double centered = 0.0;
  for (std::size_t k = 0; k < rho.terms.size(); ++k) {
    const auto [h, w] = rho.terms[k];
    const double s = design.S_diag()(h);
    out.value += w * s * estimate.at(h);
    centered += w * s * (estimate.at(h) - null_values[k]);
  }
  out.variance = asy_variance(rho, inv, cov);
  if (!(out.variance > 0.0)) {
    throw NumericalError(NumericalFailure::inversion_failure, "contrast: zero variance");
  }
  out.z = centered / std::sqrt(out.variance);
  out.p_value = 2.0 * normal_cdf(-std::abs(out.z));
  return out;
}

double inverse_quadratic_form(const VectorXd& d, const MatrixXd& V) {
  Eigen::LLT<MatrixXd> llt(V);
  if (llt.info() != Eigen::Success || (llt.matrixL().toDenseMatrix().diagonal().array() <= 0.0).any()) {
    throw NumericalError(NumericalFailure::inversion_failure,
                         "Wald: covariance submatrix is not positive definite");
  }
  const VectorXd w = llt.matrixL().solve(d);
  return w.squaredNorm();
}

WaldTest wald_chi2(const std::vector<Index>& H, const VectorXd& null_values, const DebiasedEstimate& estimate,
                   const NodewiseInverse& inv, const RobustCovariance& cov, const DesignSystem& design) {
  if (H.empty()) throw InputError("Wald: empty hypothesis set");
  if (null_values.size() != static_cast<Index>(H.size())) throw InputError("Wald: one null value per index");
  const Index h = static_cast<Index>(H.size());
  VectorXd d(h);
  for (Index k = 0; k < h; ++k) {
    const Index idx = H[static_cast<std::size_t>(k)];
    d(k) = design.S_diag()(idx) * (estimate.at(idx) - null_values(k));
  }
  WaldTest test;
  test.H = H;
  test.h = h;
  test.null_values = null_values;
  test.statistic = inverse_quadratic_form(d, sandwich_submatrix(H, inv, cov));
  test.p_value = chi2_upper_tail(test.statistic, static_cast<double>(h));
  return test;
}

}  // namespace dynpanel
