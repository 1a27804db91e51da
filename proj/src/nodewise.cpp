#include "dynpanel/nodewise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynpanel/errors.hpp"

namespace dynpanel {

namespace {

std::size_t position_of(const std::vector<Index>& rows, Index j) {
  const auto it = std::find(rows.begin(), rows.end(), j);
  return static_cast<std::size_t>(it - rows.begin());
}

WeightedLassoProblem nodewise_problem(const DesignSystem& design, Index j, double lambda) {
  const MatrixXd& Z = design.Z();
  return WeightedLassoProblem{Z.col(j), Regressors::dense_without(Z, j),
                              1.0 / static_cast<double>(design.rows()), VectorXd::Ones(Z.cols() - 1),
                              lambda};
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

bool NodewiseInverse::has_row(Index j) const { return position_of(target_rows, j) < target_rows.size(); }

const VectorXd& NodewiseInverse::theta_row(Index j) const {
  const std::size_t pos = position_of(target_rows, j);
  if (pos >= target_rows.size()) {
    throw ContractError("no nodewise row fitted for coefficient index " + std::to_string(j));
  }
  return theta_rows[pos];
}

double NodewiseInverse::tau_sq_of(Index j) const {
  const std::size_t pos = position_of(target_rows, j);
  if (pos >= target_rows.size()) {
    throw ContractError("no nodewise row fitted for coefficient index " + std::to_string(j));
  }
  return tau_sq[pos];
}

double theoretical_nodewise_lambda(double M, Index p, Index N) {
  const double lg = std::log(static_cast<double>(p));
  return std::sqrt(16.0 * M * lg * lg * lg / static_cast<double>(N));
}

NodewiseInverse fit_nodewise(const DesignSystem& design, const std::vector<Index>& target_rows,
                             const NodewiseLambdaMode& mode, double tol, int max_iter) {
  const Index p = design.p();
  if (target_rows.empty()) throw InputError("nodewise: empty target row set");
  if (p < 2) throw InputError("nodewise: needs at least two columns in Z");
  std::vector<Index> rows;
  for (Index j : target_rows) {
    if (j < 0 || j >= p) throw InputError("nodewise: row index " + std::to_string(j) + " outside Z");
    if (std::find(rows.begin(), rows.end(), j) == rows.end()) rows.push_back(j);
  }

  NodewiseInverse inv;
  inv.target_rows = rows;
  std::vector<std::optional<VectorXd>> warm(rows.size());

  if (const auto* th = std::get_if<TheoreticalLambda>(&mode)) {
    if (!(th->M > 0.0)) throw InputError("nodewise: M must be positive");
    inv.lambda_node = theoretical_nodewise_lambda(th->M, p, design.units());
  } else if (const auto* fixed = std::get_if<FixedLambda>(&mode)) {
    if (!(fixed->value >= 0.0)) throw InputError("nodewise: fixed lambda must be non-negative");
    inv.lambda_node = fixed->value;
  } else {
    const auto& bic = std::get<BicLambda>(mode);
    std::vector<LambdaSelection> selections;
    for (Index j : rows) {
      selections.push_back(bic_select(nodewise_problem(design, j, 0.0), bic, tol, max_iter));
      inv.row_lambdas.push_back(selections.back().lambda);
    }
    inv.lambda_node = median(inv.row_lambdas);
    // Warm start each row from the grid point closest to the shared lambda.
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& path = selections[r].path;
      std::size_t nearest = 0;
      for (std::size_t g = 1; g < path.size(); ++g) {
        if (std::abs(std::log(path[g].lambda / inv.lambda_node)) <
            std::abs(std::log(path[nearest].lambda / inv.lambda_node))) {
          nearest = g;
        }
      }
      warm[r] = path[nearest].fit.coefficients;
    }
  }

  const double NT = static_cast<double>(design.rows());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index j = rows[r];
    const WeightedLassoProblem problem = nodewise_problem(design, j, inv.lambda_node);
    const LassoFit fit = solve_weighted_lasso(problem, warm[r], tol, max_iter);
    const VectorXd resid = problem.response - problem.regressors.multiply(fit.coefficients);
    const double tau_sq = resid.squaredNorm() / NT + inv.lambda_node * fit.coefficients.lpNorm<1>();
    if (!(tau_sq > 1e-12 * design.Z().col(j).squaredNorm() / NT) || !std::isfinite(tau_sq)) {
      throw NumericalError(NumericalFailure::degenerate_column,
                           "nodewise: tau^2 for column " + std::to_string(j) + " is not positive");
    }
    VectorXd theta(p);
    for (Index k = 0, src = 0; k < p; ++k) {
      theta(k) = k == j ? 1.0 / tau_sq : -fit.coefficients(src++) / tau_sq;
    }
    inv.phi.push_back(fit.coefficients);
    inv.tau_sq.push_back(tau_sq);
    inv.theta_rows.push_back(std::move(theta));
  }
  return inv;
}

std::vector<ApproxInverseRow> approx_inverse_check(const NodewiseInverse& inv, const DesignSystem& design) {
  const MatrixXd& Z = design.Z();
  const double NT = static_cast<double>(design.rows());
  std::vector<ApproxInverseRow> out;
  for (std::size_t r = 0; r < inv.target_rows.size(); ++r) {
    const Index j = inv.target_rows[r];
    const VectorXd fitted = Z * inv.theta_rows[r];
    VectorXd product = Z.transpose() * fitted / NT;
    ApproxInverseRow row;
    row.row = j;
    row.diagonal_error = product(j) - 1.0;
    product(j) -= 1.0;
    row.sup_error = product.cwiseAbs().maxCoeff();
    row.bound = inv.lambda_node / inv.tau_sq[r];
    out.push_back(row);
  }
  return out;
}

}  // namespace dynpanel
