#pragma once

#include <vector>

#include "dynpanel/nodewise.hpp"
#include "dynpanel/panel_model.hpp"
#include "dynpanel/solver.hpp"

namespace dynpanel {

/// Debiased entries gamma~_h for a requested index set (0-based positions
/// in gamma = (alpha', eta')').
struct DebiasedEstimate {
  std::vector<Index> indices;
  VectorXd values;
  /// Lasso coefficients the correction was applied to.
  VectorXd lasso;

  bool has(Index h) const;
  /// Throws ContractError for an index that was not requested.
  double at(Index h) const;
};

/// gamma~ = gamma^ + S^{-1} Theta S^{-1} Pi'(y - Pi gamma^), Theta = diag(Theta_Z, I_N).
DebiasedEstimate desparsify(const LassoFit& fit, const DesignSystem& design, const VectorXd& y,
                            const NodewiseInverse& inv, const std::vector<Index>& indices);

/// Same correction with a dense (p+N) x (p+N) Theta in place of the nodewise one.
DebiasedEstimate desparsify(const LassoFit& fit, const DesignSystem& design, const VectorXd& y,
                            const MatrixXd& theta, const std::vector<Index>& indices);

/// Delta = (Theta Psi_N - I) S (gamma^ - gamma) restricted to `indices`.
VectorXd delta_diagnostic(const LassoFit& fit, const NodewiseInverse& inv, const DesignSystem& design,
                          const VectorXd& gamma_true, const std::vector<Index>& indices);

/// [Theta S^{-1} Pi' eps]_h for the requested indices (needs the true errors).
VectorXd noise_projection(const NodewiseInverse& inv, const DesignSystem& design, const VectorXd& eps,
                          const std::vector<Index>& indices);

}  // namespace dynpanel
