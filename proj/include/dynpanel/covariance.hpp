#pragma once

#include <utility>
#include <vector>

#include "dynpanel/nodewise.hpp"
#include "dynpanel/panel_model.hpp"
#include "dynpanel/solver.hpp"

namespace dynpanel {

/// Blocks of the heteroskedasticity-robust meat matrix
///   [ (1/NT) sum e^2 z z'            (1/(sqrt(N) T)) sum e^2 z d' ]
///   [ ...                            (1/T) sum e^2 d d'           ]
struct RobustCovariance {
  MatrixXd sigma1;      // p x p
  MatrixXd sigma2;      // p x N
  VectorXd sigma3_diag; // N
};

/// Sparse vector over gamma indices (0-based).
struct Contrast {
  std::vector<std::pair<Index, double>> terms;

  static Contrast basis(Index h) { return Contrast{{{h, 1.0}}}; }
  double norm() const;
};

/// e_{i,t} = y_{i,t} - z_{i,t}' alpha^ - eta^_i
VectorXd residuals(const LassoFit& fit, const DesignSystem& design, const VectorXd& y);
VectorXd residuals(const VectorXd& gamma, const DesignSystem& design, const VectorXd& y);

RobustCovariance sigma_blocks(const DesignSystem& design, const VectorXd& residuals);

/// rho' Theta Sigma Theta' rho' without materializing Theta.
double sandwich_form(const Contrast& a, const Contrast& b, const NodewiseInverse& inv,
                     const RobustCovariance& cov);

/// rho' Theta Sigma Theta' rho for a unit-norm rho; tiny negative round-off is clipped.
double asy_variance(const Contrast& rho, const NodewiseInverse& inv, const RobustCovariance& cov);

/// (Theta Sigma Theta')_H for 0-based indices H.
MatrixXd sandwich_submatrix(const std::vector<Index>& indices, const NodewiseInverse& inv,
                            const RobustCovariance& cov);

}  // namespace dynpanel
