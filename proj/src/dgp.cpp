#include "dynpanel/dgp.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "dynpanel/errors.hpp"

namespace dynpanel {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::gaussian: return "gaussian";
    case ErrorKind::hetero: return "hetero";
    case ErrorKind::t3_hetero: return "t3_hetero";
  }
  return "gaussian";
}

ErrorKind parse_error_kind(const std::string& name) {
  if (name == "gaussian") return ErrorKind::gaussian;
  if (name == "hetero") return ErrorKind::hetero;
  if (name == "t3_hetero" || name == "t3") return ErrorKind::t3_hetero;
  throw InputError("unknown error kind '" + name + "' (gaussian | hetero | t3_hetero)");
}

std::vector<Index> DgpConfig::beta_support() const {
  std::vector<Index> pos;
  if (beta_nonzero <= 0) return pos;
  const Index spacing = p_x / beta_nonzero;
  for (Index k = 0; k < beta_nonzero; ++k) pos.push_back(k * spacing);
  return pos;
}

void DgpConfig::validate() const {
  if (N < 1 || T < 1) throw InputError("dgp: N and T must be positive");
  if (p_x < 2) throw InputError("dgp: p_x must be at least 2");
  if (L_fit < L_true()) throw InputError("dgp: L_fit must be at least the true lag order");
  if (L_fit < 0 || burn_in < 0) throw InputError("dgp: negative lag order or burn-in");
  if (beta_nonzero < 0 || beta_nonzero > p_x) throw InputError("dgp: beta_nonzero outside [0, p_x]");
  if (!(std::abs(rho_toeplitz) < 1.0)) throw InputError("dgp: |rho_toeplitz| must be below 1");
  if (!(std::abs(a_x) < 1.0)) throw InputError("dgp: |a_x| must be below 1");
  if (!(noise_scale >= 0.0)) throw InputError("dgp: noise_scale must be non-negative");
  if (error_kind != ErrorKind::gaussian && !(2.0 * rho_toeplitz * rho_toeplitz + 2.0 - 4.0 * a_x * a_x >= 0.0)) {
    throw InputError("dgp: heteroskedastic scale b_x undefined for this (rho, a_x)");
  }
  const double radius = check_stability(alpha_true);
  if (!(radius < 1.0)) {
    throw NumericalError(NumericalFailure::unstable_dgp,
                         "dgp: lag polynomial is not stationary (spectral radius " + std::to_string(radius) + ")");
  }
}

double check_stability(const std::vector<double>& alpha) {
  const Index L = static_cast<Index>(alpha.size());
  if (L == 0) return 0.0;
  MatrixXd companion = MatrixXd::Zero(L, L);
  for (Index j = 0; j < L; ++j) companion(0, j) = alpha[static_cast<std::size_t>(j)];
  for (Index j = 1; j < L; ++j) companion(j, j - 1) = 1.0;
  Eigen::EigenSolver<MatrixXd> solver(companion, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double heteroskedastic_bx(double rho, double a_x) {
  return (-std::sqrt(2.0) * rho + std::sqrt(2.0 * rho * rho + 2.0 - 4.0 * a_x * a_x)) / 2.0;
}

MatrixXd toeplitz_matrix(Index dim, double rho) {
  MatrixXd m(dim, dim);
  for (Index k = 0; k < dim; ++k) {
    for (Index l = 0; l < dim; ++l) m(k, l) = std::pow(rho, static_cast<double>(std::abs(k - l)));
  }
  return m;
}

VectorXd toeplitz_cholesky_apply(const VectorXd& v, double rho) {
  // The Cholesky factor of rho^{|k-l|} is the AR(1)-in-index filter.
  VectorXd out(v.size());
  if (v.size() == 0) return out;
  const double s = std::sqrt(1.0 - rho * rho);
  out(0) = v(0);
  for (Index k = 1; k < v.size(); ++k) out(k) = rho * out(k - 1) + s * v(k);
  return out;
}

namespace {

double innovation(Rng& rng, ErrorKind kind) {
  return kind == ErrorKind::t3_hetero ? rng.student_t(3) : rng.normal();
}

}  // namespace

std::vector<MatrixXd> simulate_x_trajectory(const DgpConfig& config, Rng& rng) {
  const Index steps = config.burn_in + config.T;
  std::vector<MatrixXd> units;
  units.reserve(static_cast<std::size_t>(config.N));
  VectorXd raw(config.p_x), prev(config.p_x);
  for (Index i = 0; i < config.N; ++i) {
    MatrixXd traj(steps, config.p_x);
    prev.setZero();
    for (Index s = 0; s < steps; ++s) {
      for (Index k = 0; k < config.p_x; ++k) raw(k) = innovation(rng, config.error_kind);
      prev = config.a_x * prev + toeplitz_cholesky_apply(raw, config.rho_toeplitz);
      traj.row(s) = prev.transpose();
    }
    units.push_back(std::move(traj));
  }
  return units;
}

std::vector<MatrixXd> simulate_x(const DgpConfig& config, Rng& rng) {
  std::vector<MatrixXd> full = simulate_x_trajectory(config, rng);
  for (auto& m : full) m = m.bottomRows(config.T).eval();
  return full;
}

SimulatedPanel simulate_panel(const DgpConfig& config) {
  Rng rng(config.seed);
  return simulate_panel(config, rng);
}

SimulatedPanel simulate_panel(const DgpConfig& config, Rng& rng) {
  config.validate();
  const Index N = config.N, T = config.T, px = config.p_x, L = config.L_fit;
  const Index burn = config.burn_in, steps = burn + T;

  SimulatedPanel out;
  out.meta.seed = config.seed;
  out.meta.b_x = heteroskedastic_bx(config.rho_toeplitz, config.a_x);

  VectorXd b_eta(px);
  {
    std::optional<Rng> own;
    if (config.b_eta_seed) own.emplace(*config.b_eta_seed);
    Rng& source = own ? *own : rng;
    for (Index k = 0; k < px; ++k) b_eta(k) = source.normal();
    b_eta /= b_eta.lpNorm<1>();
  }
  out.meta.b_eta = b_eta;

  VectorXd beta = VectorXd::Zero(px);
  for (Index k : config.beta_support()) beta(k) = config.beta_value;

  const std::vector<MatrixXd> x = simulate_x_trajectory(config, rng);

  PanelData& panel = out.panel;
  panel.N = N;
  panel.T = T;
  panel.L = L;
  panel.p_x = px;
  panel.y.resize(N, T);
  panel.y_init.resize(N, L);
  panel.x.resize(N * T, px);
  out.meta.eps.resize(N * T);

  VectorXd eta(N);
  const double eta_scale = std::sqrt(std::log(static_cast<double>(px)));
  const Index Lt = config.L_true();
  VectorXd y(steps);
  for (Index i = 0; i < N; ++i) {
    const MatrixXd& xi = x[static_cast<std::size_t>(i)];
    eta(i) = xi.row(burn).dot(b_eta) / eta_scale;
    for (Index s = 0; s < steps; ++s) {
      double e = innovation(rng, config.error_kind);
      if (config.error_kind != ErrorKind::gaussian) {
        e *= xi(s, 0) / std::sqrt(2.0) + out.meta.b_x * xi(s, 1);
      }
      e *= config.noise_scale;
      double value = xi.row(s).dot(beta) + eta(i) + e;
      for (Index l = 1; l <= Lt && l <= s; ++l) value += config.alpha_true[static_cast<std::size_t>(l - 1)] * y(s - l);
      y(s) = value;
      if (s >= burn) out.meta.eps(i * T + (s - burn)) = e;
    }
    panel.y.row(i) = y.tail(T).transpose();
    for (Index l = 1; l <= L; ++l) panel.y_init(i, l - 1) = burn - l >= 0 ? y(burn - l) : 0.0;
    panel.x.middleRows(i * T, T) = xi.bottomRows(T);
  }

  out.gamma_true = VectorXd::Zero(L + px + N);
  for (Index l = 0; l < Lt; ++l) out.gamma_true(l) = config.alpha_true[static_cast<std::size_t>(l)];
  out.gamma_true.segment(L, px) = beta;
  out.gamma_true.tail(N) = eta;
  return out;
}

}  // namespace dynpanel
