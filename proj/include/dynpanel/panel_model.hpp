#pragma once

#include <Eigen/Dense>

namespace dynpanel {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Balanced panel of N units over T periods.
///
/// Layout:
///   y(i, t - 1)       = y_{i,t}        for t = 1..T
///   y_init(i, l - 1)  = y_{i,1-l}      for l = 1..L   (y_{i,0}, y_{i,-1}, ...)
///   x(i * T + t - 1, k) = x_{i,t,k}    unit-major rows
struct PanelData {
  Index N = 0;
  Index T = 0;
  Index L = 0;
  Index p_x = 0;
  MatrixXd y;
  MatrixXd y_init;
  MatrixXd x;

  /// Throws InputError when shapes or values are inconsistent.
  void validate() const;

  bool operator==(const PanelData& other) const;
};

/// Stacked regressor system y = Z alpha + D eta + eps, D = I_N (x) iota_T.
///
/// D is never stored: row r belongs to unit r / T.
class DesignSystem {
 public:
  DesignSystem(MatrixXd Z, Index units, Index periods, Index lags);

  Index units() const { return N_; }
  Index periods() const { return T_; }
  Index lags() const { return L_; }
  Index p() const { return Z_.cols(); }
  Index rows() const { return Z_.rows(); }
  Index num_params() const { return p() + N_; }

  const MatrixXd& Z() const { return Z_; }
  const VectorXd& S_diag() const { return S_diag_; }

  Index unit_of_row(Index row) const { return row / T_; }

  /// D'v: per-unit sums of a length-NT vector.
  VectorXd unit_sums(const VectorXd& v) const;
  /// D eta: repeats each unit value T times.
  VectorXd expand_units(const VectorXd& eta) const;
  /// Pi gamma for gamma = (alpha', eta')'.
  VectorXd predict(const VectorXd& gamma) const;
  /// Pi' v = (Z'v, D'v).
  VectorXd transpose_multiply(const VectorXd& v) const;

  bool operator==(const DesignSystem& other) const;

 private:
  MatrixXd Z_;
  Index N_;
  Index T_;
  Index L_;
  VectorXd S_diag_;
};

DesignSystem build_design(const PanelData& panel);

/// y stacked unit-major into a length-NT vector.
VectorXd stack_outcomes(const PanelData& panel);

/// Psi_N = S^{-1} Pi' Pi S^{-1}, assembled blockwise.
MatrixXd gram(const DesignSystem& design);

}  // namespace dynpanel
