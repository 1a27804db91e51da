#include <cmath>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "doctest.h"
#include "oracles.hpp"

#include "dynpanel/covariance.hpp"
#include "dynpanel/desparsify.hpp"
#include "dynpanel/distributions.hpp"
#include "dynpanel/errors.hpp"
#include "dynpanel/inference.hpp"

using namespace dynpanel;

TEST_CASE("normal kernels against Boost.Math") {
  const boost::math::normal_distribution<double> nd;
  for (double x : {-8.0, -3.2, -1.0, -0.1, 0.0, 0.4, 1.96, 5.5}) {
    CHECK(normal_cdf(x) == doctest::Approx(boost::math::cdf(nd, x)).epsilon(1e-13));
    CHECK(normal_pdf(x) == doctest::Approx(boost::math::pdf(nd, x)).epsilon(1e-13));
  }
  for (double p : {1e-12, 1e-6, 0.001, 0.025, 0.3, 0.5, 0.77, 0.975, 0.999999}) {
    CHECK(normal_quantile(p) == doctest::Approx(boost::math::quantile(nd, p)).epsilon(1e-12));
  }
  CHECK(std::abs(normal_quantile(0.975) - 1.959964) <= 1e-5);
  CHECK(two_sided_multiplier(0.95) == doctest::Approx(normal_quantile(0.975)));
}

TEST_CASE("incomplete gamma and chi-square against Boost.Math") {
  for (double a : {0.5, 1.0, 1.5, 3.0, 10.0, 40.0}) {
    for (double x : {0.01, 0.7, 2.0, 5.0, 12.0, 60.0}) {
      CHECK(regularized_gamma_p(a, x) == doctest::Approx(boost::math::gamma_p(a, x)).epsilon(1e-12));
      const double q = boost::math::gamma_q(a, x);
      CHECK(std::abs(regularized_gamma_q(a, x) - q) <= 1e-12 * std::max(q, 1e-300) + 1e-300);
    }
  }
  for (double k : {1.0, 2.0, 3.0, 7.0}) {
    const boost::math::chi_squared_distribution<double> chi(k);
    for (double x : {0.1, 1.0, 3.0, 7.8147, 20.0}) {
      CHECK(chi2_cdf(x, k) == doctest::Approx(boost::math::cdf(chi, x)).epsilon(1e-12));
      CHECK(chi2_upper_tail(x, k) == doctest::Approx(boost::math::cdf(boost::math::complement(chi, x))).epsilon(1e-11));
    }
  }
  CHECK(std::abs(chi2_upper_tail(7.8147, 3) - 0.05) <= 1e-4);
  CHECK(chi2_upper_tail(0.0, 3) == 1.0);
}

TEST_CASE("gaussian interval") {
  const InferenceResult r = gaussian_interval(3, 1.0, 0.5, 0.9);
  const double z = normal_quantile(0.95);
  CHECK(r.ci_lower == doctest::Approx(1.0 - z * 0.5));
  CHECK(r.ci_upper == doctest::Approx(1.0 + z * 0.5));
  CHECK(!r.degenerate);
  const InferenceResult d = gaussian_interval(3, 1.0, 0.0, 0.95);
  CHECK(d.degenerate);
  CHECK(d.ci_lower == 1.0);
  CHECK(d.ci_upper == 1.0);
  CHECK_THROWS_AS(gaussian_interval(0, 0.0, 1.0, 1.5), InputError);
}

namespace {

struct Fixture {
  Index N = 6, T = 10, p = 4;
  MatrixXd Z;
  DesignSystem design;
  VectorXd y;
  LassoFit fit;
  NodewiseInverse inv;
  RobustCovariance cov;
  DebiasedEstimate est;

  Fixture() : Z(make_z()), design(Z, N, T, 0) {
    std::mt19937_64 gen(7);
    VectorXd gamma = VectorXd::Zero(p + N);
    gamma(0) = 1.0;
    y = design.predict(gamma) + oracle::gaussian_vector(N * T, gen);
    fit = solve_weighted_lasso(panel_problem(design, y, 2.0));
    inv = fit_nodewise(design, {0, 1, 2, 3}, FixedLambda{0.1});
    cov = sigma_blocks(design, residuals(fit, design, y));
    est = desparsify(fit, design, y, inv, {0, 2, p + 1});
  }
  MatrixXd make_z() {
    std::mt19937_64 gen(6);
    return oracle::correlated_design(N * T, p, 0.3, gen);
  }
};

}  // namespace

TEST_CASE("confidence interval scaling") {
  const Fixture f;
  const InferenceResult a = confidence_interval(0, f.est, f.inv, f.cov, f.design, 0.95);
  const double va = asy_variance(Contrast::basis(0), f.inv, f.cov);
  CHECK(a.std_error == doctest::Approx(std::sqrt(va / 60.0)));
  CHECK(a.ci_upper - a.ci_lower == doctest::Approx(2.0 * 1.959963984540054 * a.std_error));
  const InferenceResult e = confidence_interval(f.p + 1, f.est, f.inv, f.cov, f.design, 0.95);
  CHECK(e.std_error == doctest::Approx(std::sqrt(f.cov.sigma3_diag(1) / 10.0)));
  CHECK(e.estimate == f.est.at(f.p + 1));
}

TEST_CASE("Wald statistic") {
  const Fixture f;
  const std::vector<Index> H{0, 2, f.p + 1};
  VectorXd at_estimate(3);
  for (Index k = 0; k < 3; ++k) at_estimate(k) = f.est.at(H[static_cast<std::size_t>(k)]);
  const WaldTest zero = wald_chi2(H, at_estimate, f.est, f.inv, f.cov, f.design);
  CHECK(zero.statistic == doctest::Approx(0.0));
  CHECK(zero.p_value == doctest::Approx(1.0));

  const VectorXd nulls = VectorXd::Zero(3);
  const WaldTest w = wald_chi2(H, nulls, f.est, f.inv, f.cov, f.design);
  // Dense oracle: d' V^{-1} d with V from the explicit sandwich.
  VectorXd d(3);
  for (Index k = 0; k < 3; ++k) {
    const Index h = H[static_cast<std::size_t>(k)];
    d(k) = f.design.S_diag()(h) * f.est.at(h);
  }
  const MatrixXd V = sandwich_submatrix(H, f.inv, f.cov);
  CHECK(w.statistic == doctest::Approx(d.dot(V.colPivHouseholderQr().solve(d))).epsilon(1e-10));
  CHECK(w.p_value == doctest::Approx(chi2_upper_tail(w.statistic, 3)));

  const WaldTest one = wald_chi2({2}, VectorXd::Zero(1), f.est, f.inv, f.cov, f.design);
  const ContrastStatistic z = contrast_statistic(Contrast::basis(2), {0.0}, f.est, f.inv, f.cov, f.design);
  CHECK(one.statistic == doctest::Approx(z.z * z.z).epsilon(1e-10));
  const InferenceResult ci = confidence_interval(2, f.est, f.inv, f.cov, f.design, 0.95);
  CHECK(one.statistic == doctest::Approx(std::pow(ci.estimate / ci.std_error, 2)).epsilon(1e-10));
}

TEST_CASE("singular Wald matrix is reported") {
  CHECK_THROWS_AS(inverse_quadratic_form(VectorXd::Ones(2), MatrixXd::Ones(2, 2)), NumericalError);
  try {
    inverse_quadratic_form(VectorXd::Ones(2), MatrixXd::Zero(2, 2));
  } catch (const NumericalError& e) {
    CHECK(e.kind() == NumericalFailure::inversion_failure);
  }
}
