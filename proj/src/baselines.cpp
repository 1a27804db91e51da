#include "dynpanel/baselines.hpp"

#include <algorithm>

#include "dynpanel/errors.hpp"

namespace dynpanel {

std::optional<Index> OlsFit::position(Index h) const {
  const auto it = std::lower_bound(alpha_columns.begin(), alpha_columns.end(), h);
  if (it == alpha_columns.end() || *it != h) return std::nullopt;
  return static_cast<Index>(it - alpha_columns.begin());
}

OlsFit ols_fit(const DesignSystem& design, const VectorXd& y, const std::vector<Index>& alpha_columns) {
  const Index N = design.units(), T = design.periods(), p = design.p();
  OlsFit fit;
  fit.alpha_columns = alpha_columns;
  std::sort(fit.alpha_columns.begin(), fit.alpha_columns.end());
  fit.alpha_columns.erase(std::unique(fit.alpha_columns.begin(), fit.alpha_columns.end()),
                          fit.alpha_columns.end());
  for (Index h : fit.alpha_columns) {
    if (h < 0 || h >= p) throw InputError("ols: column index outside Z");
  }
  const Index k = static_cast<Index>(fit.alpha_columns.size());
  if (k + N > design.rows()) {
    fit.applicable = false;
    return fit;
  }

  // Within transformation: least squares on Pi is FWL-equivalent to demeaned Z on demeaned y.
  MatrixXd Zw(design.rows(), k);
  for (Index c = 0; c < k; ++c) Zw.col(c) = design.Z().col(fit.alpha_columns[static_cast<std::size_t>(c)]);
  VectorXd yw = y;
  for (Index i = 0; i < N; ++i) {
    auto block = Zw.middleRows(i * T, T);
    block.rowwise() -= block.colwise().mean();
    auto yb = yw.segment(i * T, T);
    yb.array() -= yb.mean();
  }

  VectorXd alpha = VectorXd::Zero(k);
  MatrixXd ginv = MatrixXd::Zero(k, k);
  if (k > 0) {
    const MatrixXd G = Zw.transpose() * Zw;
    Eigen::LLT<MatrixXd> llt(G);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-13)) {
      throw NumericalError(NumericalFailure::rank_deficient,
                           "ols: demeaned regressors are rank deficient");
    }
    alpha = llt.solve(Zw.transpose() * yw);
    ginv = llt.solve(MatrixXd::Identity(k, k));
  }

  fit.coefficients = VectorXd::Zero(p + N);
  for (Index c = 0; c < k; ++c) fit.coefficients(fit.alpha_columns[static_cast<std::size_t>(c)]) = alpha(c);
  const VectorXd partial = y - design.Z() * fit.coefficients.head(p);
  fit.coefficients.tail(N) = design.unit_sums(partial) / static_cast<double>(T);
  fit.residuals = y - design.predict(fit.coefficients);

  const MatrixXd weighted = Zw.array().colwise() * fit.residuals.array().square();
  const MatrixXd meat = Zw.transpose() * weighted;
  fit.alpha_covariance = ginv * meat * ginv;
  fit.alpha_covariance = 0.5 * (fit.alpha_covariance + fit.alpha_covariance.transpose()).eval();
  return fit;
}

OlsBaselines ols_baselines(const DesignSystem& design, const VectorXd& y,
                           const std::optional<std::vector<Index>>& oracle_support) {
  OlsBaselines out;
  std::vector<Index> all(static_cast<std::size_t>(design.p()));
  for (Index k = 0; k < design.p(); ++k) all[static_cast<std::size_t>(k)] = k;
  out.full = ols_fit(design, y, all);
  if (oracle_support) {
    std::vector<Index> cols;
    for (Index h : *oracle_support) {
      if (h < design.p()) cols.push_back(h);
    }
    out.oracle = ols_fit(design, y, cols);
  }
  return out;
}

}  // namespace dynpanel
