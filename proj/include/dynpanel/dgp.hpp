#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dynpanel/panel_model.hpp"
#include "dynpanel/rng.hpp"

namespace dynpanel {

enum class ErrorKind { gaussian, hetero, t3_hetero };

const char* to_string(ErrorKind kind);
ErrorKind parse_error_kind(const std::string& name);

/// Simulation design: y_{i,t} = sum_l alpha_l y_{i,t-l} + x_{i,t}'beta + eta_i + eps_{i,t},
/// x_{i,t} = a_x x_{i,t-1} + e_{i,t}, Cov(e) Toeplitz rho^{|k-l|}.
struct DgpConfig {
  Index N = 20;
  Index T = 10;
  Index p_x = 100;
  /// Lags included in the fitted design (>= alpha_true.size()).
  Index L_fit = 5;
  std::vector<double> alpha_true{0.9, 0.0, 0.0, -0.3};
  /// Number of equidistant unit entries in beta (positions 0, p_x/s, 2 p_x/s, ...).
  Index beta_nonzero = 5;
  double beta_value = 1.0;
  double a_x = 0.5;
  double rho_toeplitz = 0.75;
  ErrorKind error_kind = ErrorKind::gaussian;
  /// Multiplies eps; 0 gives a noiseless panel.
  double noise_scale = 1.0;
  Index burn_in = 1000;
  std::uint64_t seed = 0;
  /// When set, b_eta is drawn from this stream instead of the replication stream.
  std::optional<std::uint64_t> b_eta_seed;

  Index L_true() const { return static_cast<Index>(alpha_true.size()); }
  Index p() const { return L_fit + p_x; }
  /// 0-based positions of the nonzero entries of beta.
  std::vector<Index> beta_support() const;
  /// Throws InputError / NumericalError(unstable_dgp).
  void validate() const;
};

struct SimulationMetadata {
  VectorXd b_eta;
  double b_x = 0.0;
  std::uint64_t seed = 0;
  /// Realized errors over the observed window, unit-major (length NT).
  VectorXd eps;
};

struct SimulatedPanel {
  PanelData panel;
  /// (alpha padded to L_fit', beta', eta')'
  VectorXd gamma_true;
  SimulationMetadata meta;
};

/// Spectral radius of the companion matrix of 1 - sum_j alpha_j z^j.
double check_stability(const std::vector<double>& alpha);

/// (-sqrt(2) rho + sqrt(2 rho^2 + 2 - 4 a_x^2)) / 2
double heteroskedastic_bx(double rho, double a_x);

MatrixXd toeplitz_matrix(Index dim, double rho);

/// Applies the lower Cholesky factor of toeplitz_matrix(dim, rho) to v in O(dim).
VectorXd toeplitz_cholesky_apply(const VectorXd& v, double rho);

/// Full covariate trajectories (burn_in + T rows per unit), one matrix per unit.
std::vector<MatrixXd> simulate_x_trajectory(const DgpConfig& config, Rng& rng);

/// Covariates over the observed window only (T rows per unit).
std::vector<MatrixXd> simulate_x(const DgpConfig& config, Rng& rng);

/// Uses a fresh Rng(config.seed) internally.
SimulatedPanel simulate_panel(const DgpConfig& config);
SimulatedPanel simulate_panel(const DgpConfig& config, Rng& rng);

}  // namespace dynpanel
