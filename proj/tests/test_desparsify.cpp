#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "dynpanel/covariance.hpp"
#include "dynpanel/desparsify.hpp"
#include "dynpanel/dgp.hpp"
#include "dynpanel/errors.hpp"

using namespace dynpanel;

namespace {

struct Instance {
  MatrixXd Z;
  DesignSystem design;
  VectorXd gamma;
  VectorXd eps;
  VectorXd y;
};

Instance make_instance(Index N, Index T, Index p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  MatrixXd Z = oracle::correlated_design(N * T, p, 0.3, gen);
  DesignSystem design(Z, N, T, 0);
  VectorXd gamma = VectorXd::Zero(p + N);
  gamma(0) = 1.0;
  gamma(1) = -0.5;
  gamma.tail(N) = oracle::gaussian_vector(N, gen) * 0.3;
  VectorXd eps = oracle::gaussian_vector(N * T, gen);
  VectorXd y = design.predict(gamma) + eps;
  return {std::move(Z), std::move(design), std::move(gamma), std::move(eps), std::move(y)};
}

LassoFit fit_at(const Instance& in, double lambda) {
  return solve_weighted_lasso(panel_problem(in.design, in.y, lambda), std::nullopt, 1e-12);
}

std::vector<Index> all_params(Index q) {
  std::vector<Index> r;
  for (Index h = 0; h < q; ++h) r.push_back(h);
  return r;
}

}  // namespace

TEST_CASE("unpenalized fit is left unchanged") {
  const Instance in = make_instance(4, 10, 3, 1);
  const LassoFit fit = fit_at(in, 0.0);
  const NodewiseInverse inv = fit_nodewise(in.design, {0, 1, 2}, FixedLambda{0.05});
  const DebiasedEstimate est = desparsify(fit, in.design, in.y, inv, all_params(7));
  CHECK((est.values - fit.coefficients).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("exact inverse reproduces least squares for any fit") {
  const Instance in = make_instance(5, 8, 4, 2);
  const MatrixXd pi = oracle::dense_pi(in.Z, 5, 8);
  const VectorXd ols = oracle::least_squares(pi, in.y);
  const MatrixXd theta = gram(in.design).inverse();
  for (double lambda : {0.0, 1.0, 5.0, 50.0}) {
    const DebiasedEstimate est = desparsify(fit_at(in, lambda), in.design, in.y, theta, all_params(9));
    CHECK((est.values - ols).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("fixed effect entry with a zero fit is the unit mean") {
  const Instance in = make_instance(3, 6, 2, 3);
  LassoFit zero;
  zero.coefficients = VectorXd::Zero(5);
  const NodewiseInverse inv = fit_nodewise(in.design, {0}, FixedLambda{0.1});
  const DebiasedEstimate est = desparsify(zero, in.design, in.y, inv, {2, 3, 4});
  for (Index i = 0; i < 3; ++i) CHECK(est.at(2 + i) == doctest::Approx(in.y.segment(6 * i, 6).mean()));
  CHECK_THROWS_AS(est.at(0), ContractError);
  CHECK_THROWS_AS(desparsify(zero, in.design, in.y, inv, {1}), ContractError);
}

TEST_CASE("remainder at the true coefficients and in the identity block") {
  const Instance in = make_instance(4, 12, 3, 4);
  const LassoFit fit = fit_at(in, 3.0);
  const NodewiseInverse exact = fit_nodewise(in.design, {0, 1, 2}, FixedLambda{0.0});
  LassoFit truth = fit;
  truth.coefficients = in.gamma;
  CHECK(delta_diagnostic(truth, exact, in.design, in.gamma, all_params(7)).cwiseAbs().maxCoeff() < 1e-12);
  const VectorXd d = delta_diagnostic(fit, exact, in.design, in.gamma, {4, 5});
  const MatrixXd psi = gram(in.design);
  const VectorXd s_err = in.design.S_diag().cwiseProduct(fit.coefficients - in.gamma);
  const VectorXd full = (psi - MatrixXd::Identity(7, 7)) * s_err;
  CHECK(d(0) == doctest::Approx(full(4)).epsilon(1e-10));
  CHECK(d(1) == doctest::Approx(full(5)).epsilon(1e-10));
}

TEST_CASE("decomposition identity on simulated data") {
  DgpConfig cfg;
  cfg.N = 10;
  cfg.T = 8;
  cfg.p_x = 20;
  cfg.L_fit = 4;
  cfg.seed = 9;
  const SimulatedPanel s = simulate_panel(cfg);
  const DesignSystem design = build_design(s.panel);
  const VectorXd y = stack_outcomes(s.panel);
  const LassoFit fit = solve_weighted_lasso(panel_problem(design, y, 20.0));
  const std::vector<Index> H{0, 3, 9, design.p(), design.p() + 5};
  const NodewiseInverse inv = fit_nodewise(design, {0, 3, 9}, FixedLambda{0.2});
  const DebiasedEstimate est = desparsify(fit, design, y, inv, H);
  const VectorXd noise = noise_projection(inv, design, s.meta.eps, H);
  const VectorXd delta = delta_diagnostic(fit, inv, design, s.gamma_true, H);
  for (std::size_t k = 0; k < H.size(); ++k) {
    const Index h = H[k];
    const double lhs = design.S_diag()(h) * (est.values(static_cast<Index>(k)) - s.gamma_true(h));
    CHECK(lhs == doctest::Approx(noise(static_cast<Index>(k)) - delta(static_cast<Index>(k))).epsilon(1e-8));
  }
}

TEST_CASE("requested entries do not depend on the rest of the request") {
  const Instance in = make_instance(4, 10, 3, 5);
  const LassoFit fit = fit_at(in, 2.0);
  const NodewiseInverse inv = fit_nodewise(in.design, {0, 1, 2}, FixedLambda{0.1});
  const DebiasedEstimate a = desparsify(fit, in.design, in.y, inv, {1});
  const DebiasedEstimate b = desparsify(fit, in.design, in.y, inv, {0, 1, 2, 5});
  CHECK(a.at(1) == b.at(1));
}

TEST_CASE("remainder shrinks with longer panels") {
  auto median_delta = [](Index T) {
    std::vector<double> vals;
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
      DgpConfig cfg;
      cfg.T = T;
      cfg.p_x = 30;
      cfg.burn_in = 200;
      cfg.seed = 1000 + rep;
      const SimulatedPanel s = simulate_panel(cfg);
      const DesignSystem design = build_design(s.panel);
      const VectorXd y = stack_outcomes(s.panel);
      const double lam = select_lambda(design, y, BicLambda{}).lambda;
      const LassoFit fit = solve_weighted_lasso(panel_problem(design, y, lam));
      const NodewiseInverse inv = fit_nodewise(design, {0}, BicLambda{});
      vals.push_back(std::abs(delta_diagnostic(fit, inv, design, s.gamma_true, {0})(0)));
    }
    std::sort(vals.begin(), vals.end());
    return vals[vals.size() / 2];
  };
  CHECK(median_delta(20) < median_delta(10));
}
