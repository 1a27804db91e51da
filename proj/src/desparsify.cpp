#include "dynpanel/desparsify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynpanel/errors.hpp"

namespace dynpanel {

namespace {

void check_indices(const DesignSystem& design, const NodewiseInverse& inv, const std::vector<Index>& indices) {
  for (Index h : indices) {
    if (h < 0 || h >= design.num_params()) {
      throw ContractError("index " + std::to_string(h) + " outside gamma");
    }
    if (h < design.p() && !inv.has_row(h)) {
      throw ContractError("missing nodewise row for coefficient index " + std::to_string(h));
    }
  }
}

// Theta S^{-1} Pi' v, entry h.
double theta_scaled_score(const NodewiseInverse& inv, const DesignSystem& design, const VectorXd& zt_v,
                          const VectorXd& dt_v, Index h) {
  const Index p = design.p();
  if (h < p) return inv.theta_row(h).dot(zt_v) / std::sqrt(static_cast<double>(design.rows()));
  return dt_v(h - p) / std::sqrt(static_cast<double>(design.periods()));
}

}  // namespace

bool DebiasedEstimate::has(Index h) const {
  return std::find(indices.begin(), indices.end(), h) != indices.end();
}

double DebiasedEstimate::at(Index h) const {
  const auto it = std::find(indices.begin(), indices.end(), h);
  if (it == indices.end()) throw ContractError("index " + std::to_string(h) + " was not desparsified");
  return values(it - indices.begin());
}

DebiasedEstimate desparsify(const LassoFit& fit, const DesignSystem& design, const VectorXd& y,
                            const NodewiseInverse& inv, const std::vector<Index>& indices) {
  if (fit.coefficients.size() != design.num_params() || y.size() != design.rows()) {
    throw InputError("desparsify: fit or outcome length does not match the design");
  }
  check_indices(design, inv, indices);
  const VectorXd resid = y - design.predict(fit.coefficients);
  const VectorXd zt_r = design.Z().transpose() * resid;
  const VectorXd dt_r = design.unit_sums(resid);

  DebiasedEstimate est;
  est.indices = indices;
  est.lasso = fit.coefficients;
  est.values.resize(static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index h = indices[k];
    est.values(static_cast<Index>(k)) =
        fit.coefficients(h) + theta_scaled_score(inv, design, zt_r, dt_r, h) / design.S_diag()(h);
  }
  return est;
}

DebiasedEstimate desparsify(const LassoFit& fit, const DesignSystem& design, const VectorXd& y,
                            const MatrixXd& theta, const std::vector<Index>& indices) {
  const Index q = design.num_params();
  if (fit.coefficients.size() != q || y.size() != design.rows()) {
    throw InputError("desparsify: fit or outcome length does not match the design");
  }
  if (theta.rows() != q || theta.cols() != q) throw InputError("desparsify: theta must be (p+N) x (p+N)");
  for (Index h : indices) {
    if (h < 0 || h >= q) throw ContractError("index " + std::to_string(h) + " outside gamma");
  }
  const VectorXd& s = design.S_diag();
  const VectorXd score = design.transpose_multiply(y - design.predict(fit.coefficients)).cwiseQuotient(s);
  DebiasedEstimate est;
  est.indices = indices;
  est.lasso = fit.coefficients;
  est.values.resize(static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index h = indices[k];
    est.values(static_cast<Index>(k)) = fit.coefficients(h) + theta.row(h).dot(score) / s(h);
  }
  return est;
}

VectorXd delta_diagnostic(const LassoFit& fit, const NodewiseInverse& inv, const DesignSystem& design,
                          const VectorXd& gamma_true, const std::vector<Index>& indices) {
  if (gamma_true.size() != design.num_params() || fit.coefficients.size() != design.num_params()) {
    throw InputError("delta: coefficient length does not match the design");
  }
  check_indices(design, inv, indices);
  const VectorXd err = fit.coefficients - gamma_true;
  // Theta Psi_N S err = Theta S^{-1} Pi' Pi err.
  const VectorXd fitted = design.predict(err);
  const VectorXd zt = design.Z().transpose() * fitted;
  const VectorXd dt = design.unit_sums(fitted);
  VectorXd out(static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Index h = indices[k];
    out(static_cast<Index>(k)) = theta_scaled_score(inv, design, zt, dt, h) - design.S_diag()(h) * err(h);
  }
  return out;
}

VectorXd noise_projection(const NodewiseInverse& inv, const DesignSystem& design, const VectorXd& eps,
                          const std::vector<Index>& indices) {
  check_indices(design, inv, indices);
  const VectorXd zt = design.Z().transpose() * eps;
  const VectorXd dt = design.unit_sums(eps);
  VectorXd out(static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out(static_cast<Index>(k)) = theta_scaled_score(inv, design, zt, dt, indices[k]);
  }
  return out;
}

}  // namespace dynpanel
