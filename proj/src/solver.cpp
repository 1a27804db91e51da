#include "dynpanel/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dynpanel/errors.hpp"

namespace dynpanel {

Regressors Regressors::dense(const MatrixXd& X) {
  Regressors r;
  r.X_ = &X;
  r.rows_ = X.rows();
  r.dense_cols_.resize(static_cast<std::size_t>(X.cols()));
  for (Index k = 0; k < X.cols(); ++k) r.dense_cols_[static_cast<std::size_t>(k)] = k;
  return r;
}

Regressors Regressors::panel(const DesignSystem& design) {
  Regressors r = dense(design.Z());
  r.groups_ = design.units();
  r.group_size_ = design.periods();
  return r;
}

Regressors Regressors::dense_without(const MatrixXd& X, Index excluded) {
  Regressors r;
  r.X_ = &X;
  r.rows_ = X.rows();
  for (Index k = 0; k < X.cols(); ++k) {
    if (k != excluded) r.dense_cols_.push_back(k);
  }
  return r;
}

double Regressors::dot(Index k, const VectorXd& v) const {
  const Index nd = dense_count();
  if (k < nd) return X_->col(source_column(k)).dot(v);
  return v.segment((k - nd) * group_size_, group_size_).sum();
}

double Regressors::squared_norm(Index k) const {
  const Index nd = dense_count();
  if (k < nd) return X_->col(source_column(k)).squaredNorm();
  return static_cast<double>(group_size_);
}

void Regressors::add_scaled(Index k, double a, VectorXd& v) const {
  const Index nd = dense_count();
  if (k < nd) {
    v.noalias() += a * X_->col(source_column(k));
  } else {
    v.segment((k - nd) * group_size_, group_size_).array() += a;
  }
}

VectorXd Regressors::multiply(const VectorXd& b) const {
  VectorXd out = VectorXd::Zero(rows_);
  const Index nd = dense_count();
  for (Index k = 0; k < nd; ++k) {
    if (b(k) != 0.0) out.noalias() += b(k) * X_->col(source_column(k));
  }
  for (Index g = 0; g < groups_; ++g) out.segment(g * group_size_, group_size_).array() += b(nd + g);
  return out;
}

VectorXd Regressors::transpose_multiply(const VectorXd& v) const {
  VectorXd out(cols());
  for (Index k = 0; k < cols(); ++k) out(k) = dot(k, v);
  return out;
}

double Regressors::column_dot(Index a, Index b) const {
  const Index nd = dense_count();
  if (a > b) std::swap(a, b);
  if (b < nd) return X_->col(source_column(a)).dot(X_->col(source_column(b)));
  if (a >= nd) return a == b ? static_cast<double>(group_size_) : 0.0;
  return X_->col(source_column(a)).segment((b - nd) * group_size_, group_size_).sum();
}

bool Regressors::all_finite() const {
  for (Index k = 0; k < dense_count(); ++k) {
    if (!X_->col(source_column(k)).allFinite()) return false;
  }
  return true;
}

double WeightedLassoProblem::objective(const VectorXd& b) const {
  const VectorXd r = response - regressors.multiply(b);
  return objective_scale * r.squaredNorm() +
         2.0 * lambda * penalty_weights.cwiseProduct(b.cwiseAbs()).sum();
}

WeightedLassoProblem panel_problem(const DesignSystem& design, const VectorXd& y, double lambda) {
  WeightedLassoProblem problem{y, Regressors::panel(design), 1.0,
                               VectorXd::Ones(design.num_params()), lambda};
  problem.penalty_weights.tail(design.units())
      .setConstant(1.0 / std::sqrt(static_cast<double>(design.units())));
  return problem;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

namespace {

void validate(const WeightedLassoProblem& problem, const std::optional<VectorXd>& init) {
  const Index m = problem.regressors.cols();
  if (problem.response.size() != problem.regressors.rows()) {
    throw InputError("lasso: response length does not match regressor rows");
  }
  if (problem.penalty_weights.size() != m) throw InputError("lasso: penalty weight count mismatch");
  if (!(problem.objective_scale > 0.0) || !std::isfinite(problem.objective_scale)) {
    throw InputError("lasso: objective scale must be positive");
  }
  if (!(problem.lambda >= 0.0) || !std::isfinite(problem.lambda)) {
    throw InputError("lasso: lambda must be finite and non-negative");
  }
  if (!problem.penalty_weights.allFinite() || (problem.penalty_weights.array() < 0.0).any()) {
    throw InputError("lasso: penalty weights must be finite and non-negative");
  }
  if (!problem.response.allFinite()) throw InputError("lasso: non-finite response entry");
  if (!problem.regressors.all_finite()) throw InputError("lasso: non-finite regressor entry");
  if (init && init->size() != m) throw InputError("lasso: warm start has wrong length");
}

std::vector<Index> support(const VectorXd& b) {
  std::vector<Index> s;
  for (Index k = 0; k < b.size(); ++k) {
    if (b(k) != 0.0) s.push_back(k);
  }
  return s;
}

double objective_from_residual(const WeightedLassoProblem& problem, const VectorXd& r, const VectorXd& b) {
  return problem.objective_scale * r.squaredNorm() +
         2.0 * problem.lambda * problem.penalty_weights.cwiseProduct(b.cwiseAbs()).sum();
}

double max_violation(const WeightedLassoProblem& problem, const VectorXd& b, const VectorXd& r) {
  double worst = 0.0;
  const double c = problem.objective_scale, lambda = problem.lambda;
  for (Index k = 0; k < b.size(); ++k) {
    const double g = problem.regressors.dot(k, r);
    const double wl = problem.penalty_weights(k) * lambda;
    const double v = b(k) != 0.0 ? std::abs(-2.0 * c * g + 2.0 * wl * (b(k) > 0 ? 1.0 : -1.0))
                                 : std::max(0.0, c * std::abs(g) - wl);
    worst = std::max(worst, v);
  }
  return worst;
}

// Closed-form re-solve on the current signed support. Returns true and
// overwrites b, r when the sign pattern survives and the KKT violation drops.
bool polish(const WeightedLassoProblem& problem, VectorXd& b, VectorXd& r, double current_violation) {
  const std::vector<Index> active = support(b);
  const Index a = static_cast<Index>(active.size());
  if (a == 0 || a > problem.regressors.rows()) return false;
  const Regressors& X = problem.regressors;
  MatrixXd G(a, a);
  VectorXd rhs(a);
  for (Index u = 0; u < a; ++u) {
    const Index ku = active[static_cast<std::size_t>(u)];
    for (Index v = 0; v <= u; ++v) {
      G(u, v) = X.column_dot(ku, active[static_cast<std::size_t>(v)]);
      G(v, u) = G(u, v);
    }
    const double sign = b(ku) > 0 ? 1.0 : -1.0;
    rhs(u) = X.dot(ku, problem.response) -
             problem.lambda * problem.penalty_weights(ku) * sign / problem.objective_scale;
  }
  Eigen::LLT<MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) return false;
  const VectorXd sol = llt.solve(rhs);
  if (!sol.allFinite()) return false;
  VectorXd candidate = VectorXd::Zero(b.size());
  for (Index u = 0; u < a; ++u) {
    const Index ku = active[static_cast<std::size_t>(u)];
    if (sol(u) == 0.0 || (sol(u) > 0) != (b(ku) > 0)) return false;
    candidate(ku) = sol(u);
  }
  VectorXd cand_r = problem.response - X.multiply(candidate);
  if (max_violation(problem, candidate, cand_r) > current_violation) return false;
  if (objective_from_residual(problem, cand_r, candidate) >
      objective_from_residual(problem, r, b)) {
    return false;
  }
  b = std::move(candidate);
  r = std::move(cand_r);
  return true;
}

}  // namespace

LassoFit solve_weighted_lasso(const WeightedLassoProblem& problem, const std::optional<VectorXd>& init,
                              double tol, int max_iter) {
  validate(problem, init);
  if (!(tol > 0.0) || max_iter < 1) throw InputError("lasso: tol and max_iter must be positive");

  const Regressors& X = problem.regressors;
  const Index m = X.cols();
  const double c = problem.objective_scale;

  VectorXd sq(m);
  for (Index k = 0; k < m; ++k) {
    sq(k) = X.squared_norm(k);
    if (sq(k) == 0.0 && problem.penalty_weights(k) == 0.0) {
      throw NumericalError(NumericalFailure::unpenalized_degeneracy,
                           "lasso: unpenalized column " + std::to_string(k) + " is identically zero");
    }
  }
  VectorXd thresholds = problem.penalty_weights * (problem.lambda / c);

  VectorXd b = init ? *init : VectorXd::Zero(m);
  for (Index k = 0; k < m; ++k) {
    if (sq(k) == 0.0) b(k) = 0.0;
  }
  VectorXd r = problem.response - X.multiply(b);

  LassoFit fit;
  fit.lambda = problem.lambda;

  auto update = [&](Index k) {
    if (sq(k) == 0.0) return 0.0;
    const double old = b(k);
    const double rho = X.dot(k, r) + sq(k) * old;
    const double fresh = soft_threshold(rho, thresholds(k)) / sq(k);
    const double delta = fresh - old;
    if (delta != 0.0) {
      X.add_scaled(k, -delta, r);
      b(k) = fresh;
    }
    return std::abs(delta);
  };
  auto threshold = [&]() { return tol * (1.0 + b.cwiseAbs().maxCoeff()); };
  auto record = [&]() { fit.objective_trace.push_back(objective_from_residual(problem, r, b)); };

  const double kkt_target = tol * (1.0 + problem.lambda);
  int sweeps = 0;
  while (sweeps < max_iter) {
    double change = 0.0;
    for (Index k = 0; k < m; ++k) change = std::max(change, update(k));
    ++sweeps;
    record();
    if (m == 0 || change < threshold()) {
      r = problem.response - X.multiply(b);
      double violation = max_violation(problem, b, r);
      if (violation > 0.0 && polish(problem, b, r, violation)) {
        violation = max_violation(problem, b, r);
        record();
      }
      if (violation <= kkt_target) {
        fit.converged = true;
        break;
      }
      continue;
    }
    // Cycle on the current support until it settles, then re-check all coordinates.
    const std::vector<Index> active = support(b);
    while (sweeps < max_iter) {
      double inner = 0.0;
      for (Index k : active) inner = std::max(inner, update(k));
      ++sweeps;
      record();
      if (inner < threshold()) break;
    }
  }

  r = problem.response - X.multiply(b);
  fit.coefficients = std::move(b);
  fit.active_set = support(fit.coefficients);
  fit.objective_value = objective_from_residual(problem, r, fit.coefficients);
  fit.iterations = sweeps;
  return fit;
}

KktReport kkt_report(const VectorXd& coefficients, const WeightedLassoProblem& problem) {
  const VectorXd r = problem.response - problem.regressors.multiply(coefficients);
  KktReport report;
  report.violations.resize(coefficients.size());
  const double c = problem.objective_scale, lambda = problem.lambda;
  for (Index k = 0; k < coefficients.size(); ++k) {
    const double g = problem.regressors.dot(k, r);
    const double wl = problem.penalty_weights(k) * lambda;
    const double bk = coefficients(k);
    report.violations(k) = bk != 0.0 ? std::abs(-2.0 * c * g + 2.0 * wl * (bk > 0 ? 1.0 : -1.0))
                                     : std::max(0.0, c * std::abs(g) - wl);
  }
  report.max_violation = coefficients.size() > 0 ? report.violations.maxCoeff() : 0.0;
  return report;
}

KktReport kkt_report(const LassoFit& fit, const WeightedLassoProblem& problem) {
  return kkt_report(fit.coefficients, problem);
}

double lambda_max(const WeightedLassoProblem& problem) {
  double best = 0.0;
  for (Index k = 0; k < problem.regressors.cols(); ++k) {
    const double w = problem.penalty_weights(k);
    if (w <= 0.0) continue;
    best = std::max(best, problem.objective_scale * std::abs(problem.regressors.dot(k, problem.response)) / w);
  }
  return best;
}

double bic_value(double ssr, Index df, Index n) {
  const double dn = static_cast<double>(n);
  return dn * std::log(ssr / dn) + static_cast<double>(df) * std::log(dn);
}

LambdaSelection bic_select(const WeightedLassoProblem& problem, const BicLambda& mode, double tol,
                           int max_iter) {
  if (mode.grid_size < 2) throw InputError("bic: grid_size must be at least 2");
  if (!(mode.grid_ratio > 0.0 && mode.grid_ratio < 1.0)) {
    throw InputError("bic: grid_ratio must lie in (0, 1)");
  }
  if (!(mode.max_df_fraction > 0.0)) throw InputError("bic: max_df_fraction must be positive");
  const double top = lambda_max(problem);
  if (!(top > 0.0)) {
    throw NumericalError(NumericalFailure::degenerate_selection,
                         "bic: lambda_max is zero (response orthogonal to every penalized column)");
  }
  const Index n = problem.regressors.rows();
  LambdaSelection out;
  WeightedLassoProblem step = problem;
  std::optional<VectorXd> warm;
  double best = std::numeric_limits<double>::infinity();
  for (int g = 0; g < mode.grid_size; ++g) {
    step.lambda = top * std::pow(mode.grid_ratio, static_cast<double>(g) / (mode.grid_size - 1));
    PathPoint point;
    point.lambda = step.lambda;
    point.fit = solve_weighted_lasso(step, warm, tol, max_iter);
    point.ssr = (step.response - step.regressors.multiply(point.fit.coefficients)).squaredNorm();
    point.df = static_cast<Index>(point.fit.active_set.size());
    if (g > 0 && static_cast<double>(point.df) > mode.max_df_fraction * static_cast<double>(n)) break;
    point.bic = bic_value(point.ssr, point.df, n);
    warm = point.fit.coefficients;
    if (point.bic < best) {
      best = point.bic;
      out.selected = out.path.size();
    }
    out.path.push_back(std::move(point));
  }
  if (!out.selected) {
    throw NumericalError(NumericalFailure::degenerate_selection, "bic: no finite criterion on the grid");
  }
  out.lambda = out.path[*out.selected].lambda;
  return out;
}

double theoretical_panel_lambda(double M, Index N, Index T, Index p) {
  const double lg = std::log(static_cast<double>(std::max(p, N)));
  return std::sqrt(4.0 * M * static_cast<double>(N) * static_cast<double>(T) * lg * lg * lg);
}

LambdaSelection select_lambda(const DesignSystem& design, const VectorXd& y, const LambdaMode& mode,
                              double tol, int max_iter) {
  if (const auto* th = std::get_if<TheoreticalLambda>(&mode)) {
    if (!(th->M > 0.0)) throw InputError("theoretical lambda: M must be positive");
    LambdaSelection out;
    out.lambda = theoretical_panel_lambda(th->M, design.units(), design.periods(), design.p());
    return out;
  }
  return bic_select(panel_problem(design, y, 0.0), std::get<BicLambda>(mode), tol, max_iter);
}

}  // namespace dynpanel
