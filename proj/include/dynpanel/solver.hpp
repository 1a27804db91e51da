#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dynpanel/panel_model.hpp"

namespace dynpanel {

/// Column-access view of a regressor matrix made of a (sub)set of dense
/// columns followed by an optional block of group-indicator columns
/// (the D = I_N (x) iota_T structure, rows grouped in contiguous blocks).
///
/// Non-owning: the referenced dense matrix must outlive the view.
class Regressors {
 public:
  /// All columns of X.
  static Regressors dense(const MatrixXd& X);
  /// (Z, D) for a unit-major panel design.
  static Regressors panel(const DesignSystem& design);
  /// The dense columns of X except `excluded` (Z_{-j}).
  static Regressors dense_without(const MatrixXd& X, Index excluded);

  Index rows() const { return rows_; }
  Index cols() const { return static_cast<Index>(dense_cols_.size()) + groups_; }
  Index dense_count() const { return static_cast<Index>(dense_cols_.size()); }
  Index group_count() const { return groups_; }
  /// Source column of X backing dense column k.
  Index source_column(Index k) const { return dense_cols_[static_cast<std::size_t>(k)]; }

  double dot(Index k, const VectorXd& v) const;
  double squared_norm(Index k) const;
  /// v += a * column k
  void add_scaled(Index k, double a, VectorXd& v) const;
  VectorXd multiply(const VectorXd& b) const;
  VectorXd transpose_multiply(const VectorXd& v) const;
  double column_dot(Index a, Index b) const;
  bool all_finite() const;

 private:
  const MatrixXd* X_ = nullptr;
  std::vector<Index> dense_cols_;
  Index rows_ = 0;
  Index groups_ = 0;
  Index group_size_ = 0;
};

/// minimize  c * ||y - X b||^2 + 2 * lambda * sum_k w_k |b_k|
struct WeightedLassoProblem {
  VectorXd response;
  Regressors regressors;
  double objective_scale = 1.0;
  VectorXd penalty_weights;
  double lambda = 0.0;

  double objective(const VectorXd& b) const;
};

/// Panel objective: c = 1, unit weights on alpha, 1/sqrt(N) on eta.
WeightedLassoProblem panel_problem(const DesignSystem& design, const VectorXd& y, double lambda);

struct LassoFit {
  VectorXd coefficients;
  double lambda = 0.0;
  std::vector<Index> active_set;
  double objective_value = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective after each sweep.
  std::vector<double> objective_trace;
};

inline constexpr double kDefaultTol = 1e-8;
inline constexpr int kDefaultMaxIter = 10000;

double soft_threshold(double z, double t);

/// Cyclic coordinate descent. Dense columns are visited first, then the
/// indicator columns, each in index order. After the coefficient-change
/// criterion is met the active set is re-solved in closed form when that
/// lowers the KKT violation.
LassoFit solve_weighted_lasso(const WeightedLassoProblem& problem,
                              const std::optional<VectorXd>& init = std::nullopt,
                              double tol = kDefaultTol, int max_iter = kDefaultMaxIter);

struct KktReport {
  VectorXd violations;
  double max_violation = 0.0;
};

KktReport kkt_report(const LassoFit& fit, const WeightedLassoProblem& problem);
KktReport kkt_report(const VectorXd& coefficients, const WeightedLassoProblem& problem);

/// Smallest lambda at which b = 0 solves the problem (unpenalized columns ignored).
double lambda_max(const WeightedLassoProblem& problem);

struct TheoreticalLambda {
  double M = 1.0;
};
struct BicLambda {
  int grid_size = 50;
  /// lambda_min / lambda_max
  double grid_ratio = 1e-3;
  /// The path stops before the first fit with df > max_df_fraction * n.
  double max_df_fraction = 0.5;
};
using LambdaMode = std::variant<TheoreticalLambda, BicLambda>;

struct PathPoint {
  double lambda = 0.0;
  double ssr = 0.0;
  Index df = 0;
  double bic = 0.0;
  LassoFit fit;
};

struct LambdaSelection {
  double lambda = 0.0;
  /// Empty for the theoretical rule.
  std::vector<PathPoint> path;
  /// Index into path of the selected point, if a path was fitted.
  std::optional<std::size_t> selected;
};

/// BIC(lambda) = n log(SSR / n) + df log(n), df = |active set|.
double bic_value(double ssr, Index df, Index n);

/// Geometric grid from lambda_max(problem) down to grid_ratio * lambda_max,
/// warm-started, returning the BIC minimizer (largest lambda on ties).
/// Near-saturated fits are never fitted past: see BicLambda::max_df_fraction.
/// The lambda field of `problem` is ignored.
LambdaSelection bic_select(const WeightedLassoProblem& problem, const BicLambda& mode,
                           double tol = kDefaultTol, int max_iter = kDefaultMaxIter);

/// sqrt(4 M N T (log max(p, N))^3)
double theoretical_panel_lambda(double M, Index N, Index T, Index p);

LambdaSelection select_lambda(const DesignSystem& design, const VectorXd& y, const LambdaMode& mode,
                              double tol = kDefaultTol, int max_iter = kDefaultMaxIter);

}  // namespace dynpanel
