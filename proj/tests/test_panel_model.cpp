#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "dynpanel/errors.hpp"
#include "dynpanel/panel_model.hpp"

using namespace dynpanel;

namespace {

PanelData small_panel(Index N, Index T, Index L, Index p_x, std::mt19937_64& gen) {
  PanelData d;
  d.N = N;
  d.T = T;
  d.L = L;
  d.p_x = p_x;
  d.y = oracle::gaussian_matrix(N, T, gen);
  d.y_init = oracle::gaussian_matrix(N, L, gen);
  d.x = oracle::gaussian_matrix(N * T, p_x, gen);
  return d;
}

}  // namespace

TEST_CASE("design shapes and scaling") {
  std::mt19937_64 gen(1);
  const PanelData d = small_panel(2, 3, 1, 2, gen);
  const DesignSystem s = build_design(d);
  CHECK(s.Z().rows() == 6);
  CHECK(s.Z().cols() == 3);
  CHECK(s.num_params() == 5);
  const double r6 = std::sqrt(6.0), r3 = std::sqrt(3.0);
  for (Index k = 0; k < 3; ++k) CHECK(s.S_diag()(k) == doctest::Approx(r6));
  for (Index k = 3; k < 5; ++k) CHECK(s.S_diag()(k) == doctest::Approx(r3));
}

TEST_CASE("no lags with a constant covariate") {
  PanelData d;
  d.N = 3;
  d.T = 4;
  d.L = 0;
  d.p_x = 1;
  d.y = MatrixXd::Ones(3, 4);
  d.y_init = MatrixXd(3, 0);
  d.x = MatrixXd::Ones(12, 1);
  const DesignSystem s = build_design(d);
  CHECK(s.Z().cols() == 1);
  CHECK(s.Z().col(0).isApprox(VectorXd::Ones(12)));
}

TEST_CASE("lag wiring") {
  PanelData d;
  d.N = 1;
  d.T = 2;
  d.L = 1;
  d.p_x = 0;
  d.y = (MatrixXd(1, 2) << 1, 2).finished();
  d.y_init = (MatrixXd(1, 1) << 5).finished();
  d.x = MatrixXd(2, 0);
  const DesignSystem s = build_design(d);
  REQUIRE(s.Z().cols() == 1);
  CHECK(s.Z()(0, 0) == 5.0);
  CHECK(s.Z()(1, 0) == 1.0);
}

TEST_CASE("two lags pull from the initial block then the observed window") {
  std::mt19937_64 gen(2);
  const PanelData d = small_panel(3, 4, 2, 1, gen);
  const DesignSystem s = build_design(d);
  for (Index i = 0; i < 3; ++i) {
    auto lag = [&](Index t, Index l) { return t - l >= 1 ? d.y(i, t - l - 1) : d.y_init(i, l - t); };
    for (Index t = 1; t <= 4; ++t) {
      const Index r = i * 4 + t - 1;
      CHECK(s.Z()(r, 0) == lag(t, 1));
      CHECK(s.Z()(r, 1) == lag(t, 2));
      CHECK(s.Z()(r, 2) == d.x(r, 0));
    }
  }
}

TEST_CASE("malformed panels are rejected") {
  std::mt19937_64 gen(3);
  PanelData d = small_panel(2, 3, 1, 2, gen);
  PanelData bad = d;
  bad.y_init = MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(build_design(bad), InputError);
  bad = d;
  bad.x(0, 0) = std::nan("");
  CHECK_THROWS_AS(build_design(bad), InputError);
  bad = d;
  bad.x = MatrixXd::Zero(5, 2);
  CHECK_THROWS_AS(build_design(bad), InputError);
}

TEST_CASE("gram matrix") {
  std::mt19937_64 gen(4);
  const PanelData d = small_panel(4, 5, 2, 3, gen);
  const DesignSystem s = build_design(d);
  const MatrixXd psi = gram(s);
  const Index p = s.p(), N = s.units();
  CHECK((psi.bottomRightCorner(N, N) - MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff() < 1e-14);

  const MatrixXd pi = oracle::dense_pi(s.Z(), N, s.periods());
  const VectorXd sinv = oracle::scaling(p, N, s.periods()).cwiseInverse();
  const MatrixXd expected = sinv.asDiagonal() * (pi.transpose() * pi) * sinv.asDiagonal();
  CHECK((psi - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("orthogonal within-unit design gives the identity gram") {
  // Two units, four periods; columns orthogonal and summing to zero within each unit.
  MatrixXd Z(8, 2);
  const double a = std::sqrt(8.0 / 8.0);
  Z << a, a, -a, a, a, -a, -a, -a, a, a, -a, a, a, -a, -a, -a;
  const DesignSystem s(Z, 2, 4, 0);
  const MatrixXd psi = gram(s);
  CHECK((psi - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("hand-built two by two panel") {
  PanelData d;
  d.N = 2;
  d.T = 2;
  d.L = 1;
  d.p_x = 1;
  d.y = (MatrixXd(2, 2) << 1, 2, 3, 4).finished();
  d.y_init = (MatrixXd(2, 1) << 0.5, -1).finished();
  d.x = (MatrixXd(4, 1) << 2, 0, 1, 1).finished();
  const DesignSystem s = build_design(d);
  // Z rows: (0.5, 2), (1, 0), (-1, 1), (3, 1)
  const MatrixXd psi = gram(s);
  CHECK(psi(0, 0) == doctest::Approx((0.25 + 1 + 1 + 9) / 4.0).epsilon(1e-12));
  CHECK(psi(0, 1) == doctest::Approx((1.0 + 0 - 1 + 3) / 4.0).epsilon(1e-12));
  CHECK(psi(1, 1) == doctest::Approx((4.0 + 0 + 1 + 1) / 4.0).epsilon(1e-12));
  // (1/(sqrt(N) T)) sum_t z_{i,t}
  CHECK(psi(0, 2) == doctest::Approx(1.5 / (std::sqrt(2.0) * 2.0)).epsilon(1e-12));
  CHECK(psi(1, 3) == doctest::Approx(2.0 / (std::sqrt(2.0) * 2.0)).epsilon(1e-12));
}

TEST_CASE("structural D operations") {
  std::mt19937_64 gen(5);
  const PanelData d = small_panel(3, 4, 1, 2, gen);
  const DesignSystem s = build_design(d);
  const MatrixXd pi = oracle::dense_pi(s.Z(), 3, 4);
  const VectorXd gamma = oracle::gaussian_vector(s.num_params(), gen);
  const VectorXd v = oracle::gaussian_vector(12, gen);
  CHECK((s.predict(gamma) - pi * gamma).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((s.transpose_multiply(v) - pi.transpose() * v).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(s.unit_of_row(7) == 1);
  CHECK(stack_outcomes(d)(5) == d.y(1, 1));
}
