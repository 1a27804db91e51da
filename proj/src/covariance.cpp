#include "dynpanel/covariance.hpp"

#include <cmath>
#include <string>

#include "dynpanel/errors.hpp"

namespace dynpanel {

double Contrast::norm() const {
  double s = 0.0;
  for (const auto& [h, w] : terms) s += w * w;
  return std::sqrt(s);
}

VectorXd residuals(const VectorXd& gamma, const DesignSystem& design, const VectorXd& y) {
  if (gamma.size() != design.num_params() || y.size() != design.rows()) {
    throw InputError("residuals: coefficient or outcome length does not match the design");
  }
  return y - design.predict(gamma);
}

VectorXd residuals(const LassoFit& fit, const DesignSystem& design, const VectorXd& y) {
  return residuals(fit.coefficients, design, y);
}

RobustCovariance sigma_blocks(const DesignSystem& design, const VectorXd& resid) {
  if (resid.size() != design.rows()) throw InputError("sigma_blocks: residual length mismatch");
  const Index N = design.units(), T = design.periods(), p = design.p();
  const double NT = static_cast<double>(design.rows());
  const VectorXd e2 = resid.array().square();

  RobustCovariance cov;
  const MatrixXd weighted = design.Z().array().colwise() * e2.array();
  cov.sigma1.noalias() = design.Z().transpose() * weighted / NT;
  cov.sigma1 = 0.5 * (cov.sigma1 + cov.sigma1.transpose()).eval();
  cov.sigma2.resize(p, N);
  cov.sigma3_diag.resize(N);
  const double s2 = 1.0 / (std::sqrt(static_cast<double>(N)) * static_cast<double>(T));
  for (Index i = 0; i < N; ++i) {
    cov.sigma2.col(i) = weighted.middleRows(i * T, T).colwise().sum().transpose() * s2;
    cov.sigma3_diag(i) = e2.segment(i * T, T).sum() / static_cast<double>(T);
  }
  return cov;
}

namespace {

struct Projected {
  VectorXd alpha_part;  // Theta_Z' rho_1
  std::vector<std::pair<Index, double>> eta_part;
  bool has_alpha = false;
};

Projected project(const Contrast& rho, const NodewiseInverse& inv, const RobustCovariance& cov) {
  const Index p = cov.sigma1.rows(), N = cov.sigma3_diag.size();
  Projected out;
  out.alpha_part = VectorXd::Zero(p);
  for (const auto& [h, w] : rho.terms) {
    if (h < 0 || h >= p + N) throw ContractError("contrast index " + std::to_string(h) + " outside gamma");
    if (w == 0.0) continue;
    if (h < p) {
      out.alpha_part.noalias() += w * inv.theta_row(h);
      out.has_alpha = true;
    } else {
      out.eta_part.emplace_back(h - p, w);
    }
  }
  return out;
}

}  // namespace

double sandwich_form(const Contrast& a, const Contrast& b, const NodewiseInverse& inv,
                     const RobustCovariance& cov) {
  const Projected pa = project(a, inv, cov), pb = project(b, inv, cov);
  double value = 0.0;
  if (pa.has_alpha && pb.has_alpha) value += pa.alpha_part.dot(cov.sigma1 * pb.alpha_part);
  if (pa.has_alpha) {
    for (const auto& [i, w] : pb.eta_part) value += w * pa.alpha_part.dot(cov.sigma2.col(i));
  }
  if (pb.has_alpha) {
    for (const auto& [i, w] : pa.eta_part) value += w * pb.alpha_part.dot(cov.sigma2.col(i));
  }
  for (const auto& [i, wa] : pa.eta_part) {
    for (const auto& [k, wb] : pb.eta_part) {
      if (i == k) value += wa * wb * cov.sigma3_diag(i);
    }
  }
  return value;
}

double asy_variance(const Contrast& rho, const NodewiseInverse& inv, const RobustCovariance& cov) {
  if (std::abs(rho.norm() - 1.0) > 1e-10) throw ContractError("asy_variance: contrast must have unit norm");
  const double v = sandwich_form(rho, rho, inv, cov);
  if (v < -1e-10) {
    throw NumericalError(NumericalFailure::negative_variance,
                         "asy_variance: sandwich quadratic form is negative (" + std::to_string(v) + ")");
  }
  return std::max(v, 0.0);
}

MatrixXd sandwich_submatrix(const std::vector<Index>& indices, const NodewiseInverse& inv,
                            const RobustCovariance& cov) {
  const Index h = static_cast<Index>(indices.size());
  MatrixXd V(h, h);
  for (Index a = 0; a < h; ++a) {
    for (Index b = 0; b <= a; ++b) {
      V(a, b) = sandwich_form(Contrast::basis(indices[static_cast<std::size_t>(a)]),
                              Contrast::basis(indices[static_cast<std::size_t>(b)]), inv, cov);
      V(b, a) = V(a, b);
    }
  }
  return V;
}

}  // namespace dynpanel
