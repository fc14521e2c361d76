#include "h2pipe/chebyshev.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace h2pipe;

namespace {

bool within_ulps(double a, double b, int ulps) {
  if (a == b) return true;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) <= ulps * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace

TEST_CASE("order one by hand") {
  const auto g = build_grid(1, 1.0);
  CHECK(g.nodes_m(0) == 0.0);
  CHECK(g.nodes_m(1) == 1.0);
  Eigen::Matrix2d expect;
  expect << -1, 1, -1, 1;
  CHECK((g.diff - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("order two by hand") {
  const auto g = build_grid(2, 2.0);
  CHECK(g.nodes_m(1) == doctest::Approx(1.0).epsilon(1e-15));
  // Lagrange basis derivatives on {0, 1, 2} evaluated at 0.
  CHECK(g.diff(0, 0) == doctest::Approx(-1.5));
  CHECK(g.diff(0, 1) == doctest::Approx(2.0));
  CHECK(g.diff(0, 2) == doctest::Approx(-0.5));

  Eigen::Vector3d sq = g.nodes_m.array().square();
  const Eigen::VectorXd d = apply_derivative(g, sq);
  CHECK(d(0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(d(1) == doctest::Approx(2.0));
  CHECK(d(2) == doctest::Approx(4.0));

  const Eigen::VectorXd one = apply_derivative(g, g.nodes_m);
  CHECK((one.array() - 1.0).abs().maxCoeff() < 1e-14);
}

TEST_CASE("node placement") {
  for (const int m : {1, 2, 5, 16, 32}) {
    const double ell = 50e3;
    const auto g = build_grid(m, ell);
    REQUIRE(g.size() == m + 1);
    CHECK(g.nodes_m(0) == 0.0);
    CHECK(g.nodes_m(m) == ell);
    for (int i = 0; i <= m; ++i) {
      const double x = ell / 2 * (1 - std::cos(i * std::numbers::pi / m));
      CHECK(within_ulps(g.nodes_m(i), x, 4));
      if (i > 0) CHECK(g.nodes_m(i) > g.nodes_m(i - 1));
    }
  }
}

TEST_CASE("rows annihilate constants") {
  for (const int m : {2, 8, 16, 24}) {
    const auto g = build_grid(m, 50e3);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      CHECK(std::abs(g.diff.row(i).sum()) <= 1e-10 * g.diff.row(i).cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("polynomial exactness up to degree M") {
  for (const int m : {4, 10, 16}) {
    for (const double ell : {1.0, 50e3}) {
      const auto g = build_grid(m, ell);
      const Eigen::ArrayXd x = g.nodes_m.array();
      for (int k = 0; k <= m; ++k) {
        const Eigen::VectorXd f = x.pow(k).matrix();
        const Eigen::VectorXd df = apply_derivative(g, f);
        const Eigen::ArrayXd exact = k == 0 ? Eigen::ArrayXd::Zero(x.size()) : Eigen::ArrayXd(k * x.pow(k - 1));
        const double scale = std::max(exact.abs().maxCoeff(), 1.0 / ell);
        INFO("M=" << m << " ell=" << ell << " k=" << k);
        CHECK((df.array() - exact).abs().maxCoeff() / scale <= 1e-8);
      }
    }
  }
}

TEST_CASE("length scaling") {
  const auto base = build_grid(16, 50e3);
  // Power-of-two factors scale every rounding step exactly.
  for (const double c : {2.0, 0.25}) {
    const auto g = build_grid(16, c * 50e3);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      for (Eigen::Index j = 0; j < g.size(); ++j) CHECK(within_ulps(g.diff(i, j) * c, base.diff(i, j), 2));
    }
  }
  // Otherwise node rounding differs; compare against the row scale since
  // interior diagonal entries are small sums of large terms.
  const auto g = build_grid(16, 3 * 50e3);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double row = base.diff.row(i).cwiseAbs().maxCoeff();
    CHECK((g.diff.row(i) * 3 - base.diff.row(i)).cwiseAbs().maxCoeff() <= 1e-13 * row);
  }
}

TEST_CASE("single precision instantiation") {
  const auto g = build_grid<float>(6, 1.0f);
  const Eigen::VectorXf f = g.nodes_m.array().square();
  const Eigen::VectorXf d = apply_derivative(g, f);
  CHECK((d - 2 * g.nodes_m).cwiseAbs().maxCoeff() < 1e-4f);
}

TEST_CASE("bad arguments") {
  CHECK_THROWS_AS((void)build_grid(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)build_grid(4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)build_grid(4, -1.0), std::invalid_argument);
  const auto g = build_grid(4, 1.0);
  CHECK_THROWS_AS((void)apply_derivative(g, Eigen::VectorXd::Ones(4)), std::invalid_argument);
}
