#include "dynpanel/panel_model.hpp"

#include <cmath>
#include <sstream>

#include "dynpanel/errors.hpp"

namespace dynpanel {

namespace {

void require_shape(const MatrixXd& m, Index rows, Index cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    std::ostringstream os;
    os << "dimension mismatch: " << name << " is " << m.rows() << "x" << m.cols()
       << ", expected " << rows << "x" << cols;
    throw InputError(os.str());
  }
}

void require_finite(const MatrixXd& m, const char* name) {
  if (!m.allFinite()) throw InputError(std::string("non-finite entry in ") + name);
}

}  // namespace

const char* to_string(NumericalFailure kind) {
  switch (kind) {
    case NumericalFailure::unpenalized_degeneracy: return "unpenalized_degeneracy";
    case NumericalFailure::degenerate_selection: return "degenerate_selection";
    case NumericalFailure::degenerate_column: return "degenerate_column";
    case NumericalFailure::inversion_failure: return "inversion_failure";
    case NumericalFailure::negative_variance: return "negative_variance";
    case NumericalFailure::rank_deficient: return "rank_deficient";
    case NumericalFailure::unstable_dgp: return "unstable_dgp";
  }
  return "unknown";
}

void PanelData::validate() const {
  if (N <= 0 || T <= 0) throw InputError("panel needs N >= 1 and T >= 1");
  if (L < 0 || p_x < 0) throw InputError("negative lag order or regressor count");
  if (L + p_x < 1) throw InputError("panel has no regressors (L + p_x = 0)");
  require_shape(y, N, T, "y");
  require_shape(y_init, N, L, "y_init");
  require_shape(x, N * T, p_x, "x");
  require_finite(y, "y");
  require_finite(y_init, "y_init");
  require_finite(x, "x");
}

bool PanelData::operator==(const PanelData& o) const {
  return N == o.N && T == o.T && L == o.L && p_x == o.p_x && y.rows() == o.y.rows() &&
         y.cols() == o.y.cols() && y == o.y && y_init.rows() == o.y_init.rows() &&
         y_init.cols() == o.y_init.cols() && y_init == o.y_init && x.rows() == o.x.rows() &&
         x.cols() == o.x.cols() && x == o.x;
}

DesignSystem::DesignSystem(MatrixXd Z, Index units, Index periods, Index lags)
    : Z_(std::move(Z)), N_(units), T_(periods), L_(lags) {
  if (N_ <= 0 || T_ <= 0 || Z_.rows() != N_ * T_ || Z_.cols() < 1) {
    throw InputError("design: Z must have N*T rows and at least one column");
  }
  S_diag_.resize(p() + N_);
  S_diag_.head(p()).setConstant(std::sqrt(static_cast<double>(N_ * T_)));
  S_diag_.tail(N_).setConstant(std::sqrt(static_cast<double>(T_)));
}

VectorXd DesignSystem::unit_sums(const VectorXd& v) const {
  VectorXd out(N_);
  for (Index i = 0; i < N_; ++i) out(i) = v.segment(i * T_, T_).sum();
  return out;
}

VectorXd DesignSystem::expand_units(const VectorXd& eta) const {
  VectorXd out(N_ * T_);
  for (Index i = 0; i < N_; ++i) out.segment(i * T_, T_).setConstant(eta(i));
  return out;
}

VectorXd DesignSystem::predict(const VectorXd& gamma) const {
  VectorXd fitted = Z_ * gamma.head(p());
  for (Index i = 0; i < N_; ++i) fitted.segment(i * T_, T_).array() += gamma(p() + i);
  return fitted;
}

VectorXd DesignSystem::transpose_multiply(const VectorXd& v) const {
  VectorXd out(num_params());
  out.head(p()).noalias() = Z_.transpose() * v;
  out.tail(N_) = unit_sums(v);
  return out;
}

bool DesignSystem::operator==(const DesignSystem& o) const {
  return N_ == o.N_ && T_ == o.T_ && L_ == o.L_ && Z_.cols() == o.Z_.cols() && Z_ == o.Z_;
}

DesignSystem build_design(const PanelData& panel) {
  if (panel.y_init.cols() != panel.L) {
    throw InputError("dimension mismatch: y_init has " + std::to_string(panel.y_init.cols()) +
                     " columns but L = " + std::to_string(panel.L));
  }
  panel.validate();
  const Index N = panel.N, T = panel.T, L = panel.L;
  MatrixXd Z(N * T, L + panel.p_x);
  for (Index i = 0; i < N; ++i) {
    for (Index t = 1; t <= T; ++t) {
      const Index row = i * T + (t - 1);
      for (Index l = 1; l <= L; ++l) {
        // y_{i,t-l}: observed when t - l >= 1, otherwise an initial value.
        const Index s = t - l;
        Z(row, l - 1) = s >= 1 ? panel.y(i, s - 1) : panel.y_init(i, -s);
      }
      if (panel.p_x > 0) Z.row(row).tail(panel.p_x) = panel.x.row(row);
    }
  }
  return DesignSystem(std::move(Z), N, T, L);
}

VectorXd stack_outcomes(const PanelData& panel) {
  VectorXd y(panel.N * panel.T);
  for (Index i = 0; i < panel.N; ++i) y.segment(i * panel.T, panel.T) = panel.y.row(i).transpose();
  return y;
}

MatrixXd gram(const DesignSystem& design) {
  const Index p = design.p(), N = design.units();
  const double NT = static_cast<double>(design.rows());
  const double T = static_cast<double>(design.periods());
  MatrixXd psi(p + N, p + N);
  psi.topLeftCorner(p, p).noalias() = design.Z().transpose() * design.Z() / NT;
  // Z'D column i = sum over unit i's rows of z_{i,t}.
  MatrixXd zd(p, N);
  for (Index i = 0; i < N; ++i) {
    zd.col(i) = design.Z().middleRows(i * design.periods(), design.periods()).colwise().sum().transpose();
  }
  zd /= T * std::sqrt(static_cast<double>(N));
  psi.topRightCorner(p, N) = zd;
  psi.bottomLeftCorner(N, p) = zd.transpose();
  psi.bottomRightCorner(N, N).setIdentity();
  return psi;
}

}  // namespace dynpanel
