#pragma once

#include <variant>
#include <vector>

#include "dynpanel/panel_model.hpp"
#include "dynpanel/solver.hpp"

namespace dynpanel {

struct FixedLambda {
  double value = 0.0;
};
using NodewiseLambdaMode = std::variant<TheoreticalLambda, BicLambda, FixedLambda>;

/// Rows j in target_rows of Theta_Z = T^{-2} C built from nodewise Lasso
/// regressions of z_j on Z_{-j}. Indices are 0-based columns of Z.
struct NodewiseInverse {
  std::vector<Index> target_rows;
  std::vector<VectorXd> phi;         // length p - 1, Z_{-j} column order
  std::vector<double> tau_sq;
  std::vector<VectorXd> theta_rows;  // length p
  double lambda_node = 0.0;
  /// BIC mode only: the per-row minimizers whose median is lambda_node.
  std::vector<double> row_lambdas;

  bool has_row(Index j) const;
  /// Throws ContractError when row j was not fitted.
  const VectorXd& theta_row(Index j) const;
  double tau_sq_of(Index j) const;
};

/// sqrt(16 M (log p)^3 / N)
double theoretical_nodewise_lambda(double M, Index p, Index N);

NodewiseInverse fit_nodewise(const DesignSystem& design, const std::vector<Index>& target_rows,
                             const NodewiseLambdaMode& mode, double tol = 1e-10,
                             int max_iter = kDefaultMaxIter);

struct ApproxInverseRow {
  Index row = 0;
  /// (1/NT) z_j' Z Theta_j - 1
  double diagonal_error = 0.0;
  /// || (1/NT) Z'Z Theta_j - e_j ||_inf
  double sup_error = 0.0;
  /// lambda_node / tau_j^2
  double bound = 0.0;
};

std::vector<ApproxInverseRow> approx_inverse_check(const NodewiseInverse& inv, const DesignSystem& design);

}  // namespace dynpanel
