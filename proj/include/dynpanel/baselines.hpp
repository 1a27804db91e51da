#pragma once

#include <optional>
#include <vector>

#include "dynpanel/panel_model.hpp"

namespace dynpanel {

/// Least squares with all N fixed effects and a subset of Z's columns,
/// computed through the within (per-unit demeaned) normal equations.
struct OlsFit {
  bool applicable = true;
  /// Z columns included, ascending.
  std::vector<Index> alpha_columns;
  /// Length p + N; zero for excluded Z columns.
  VectorXd coefficients;
  /// Heteroskedasticity-robust (HC0) covariance of the included alpha entries.
  MatrixXd alpha_covariance;
  VectorXd residuals;

  /// Position of gamma index h inside alpha_columns, if included.
  std::optional<Index> position(Index h) const;
};

/// Throws NumericalError(rank_deficient) if the demeaned columns are collinear.
/// Returns applicable = false when |columns| + N > NT.
OlsFit ols_fit(const DesignSystem& design, const VectorXd& y, const std::vector<Index>& alpha_columns);

struct OlsBaselines {
  OlsFit full;
  std::optional<OlsFit> oracle;
};

/// Full least squares on every column and, when a support is given, the oracle
/// restricted to the alpha indices in `oracle_support` (fixed effects are always kept).
OlsBaselines ols_baselines(const DesignSystem& design, const VectorXd& y,
                           const std::optional<std::vector<Index>>& oracle_support);

}  // namespace dynpanel
