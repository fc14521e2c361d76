#include "h2pipe/gas_model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace h2pipe;

namespace {

// Reference-case values written out independently of the config defaults.
constexpr double p_bar = 4.0e6, q_bar = 75.0, mu_bar = 1.75;
constexpr double lam = 0.011, diam = 0.5, ell = 50.0e3;
constexpr double sig1 = 338.0, sig2 = 4 * 338.0;

}  // namespace

TEST_CASE("default pipe matches the reference case") {
  const PipeConfig<> cfg;
  CHECK(cfg.length_m == ell);
  CHECK(cfg.diameter_m == diam);
  CHECK(cfg.friction == lam);
  CHECK(cfg.sigma1_mps == sig1);
  CHECK(cfg.sigma2_mps == sig2);
  CHECK(cfg.source_pressure_pa == p_bar);
  CHECK(cfg.withdrawal_flux == q_bar);
  CHECK(ControlParams<>{}.mu_bar == mu_bar);
  CHECK(ForcingParams<>{}.gamma_bar == 0.2);
}

TEST_CASE("hydrogen fraction forcing") {
  ForcingParams<> f{0.5, 0.85, 0.2};
  CHECK(forcing_gamma(0.0, f) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(forcing_gamma(0.5 * 3600.0, f) == doctest::Approx(0.37).epsilon(1e-14));   // quarter period
  CHECK(forcing_gamma(1.5 * 3600.0, f) == doctest::Approx(0.03).epsilon(1e-12));   // trough
  CHECK(forcing_gamma(2.0 * 3600.0, f) == doctest::Approx(0.2).epsilon(1e-12));    // full period

  ForcingParams<> full{0.5, 1.0, 0.2};
  CHECK(forcing_gamma(1.5 * 3600.0, full) == doctest::Approx(0.0).epsilon(1e-12));

  ForcingParams<> bad{0.5, 1.0, 0.6};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS((void)forcing_gamma(0.5 * 3600.0, bad), InvalidForcing);
  CHECK_THROWS_AS((ForcingParams<>{-1, 0.5, 0.2}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((ForcingParams<>{1, 1.5, 0.2}.validate()), std::invalid_argument);
}

TEST_CASE("inlet partial densities") {
  const PipeConfig<> cfg;
  const auto s = inlet_partial_densities(0.2, cfg);
  CHECK(s.s1 == doctest::Approx(28.010223731662055).epsilon(1e-14));
  CHECK(s.s2 == doctest::Approx(0.4376597458072196).epsilon(1e-14));
  CHECK(sig1 * sig1 * s.s1 + sig2 * sig2 * s.s2 == doctest::Approx(p_bar).epsilon(1e-15));
}

TEST_CASE("flux closure on a linear pressure profile") {
  const PipeConfig<> cfg;
  const auto g = build_grid(6, ell);
  const double b = 20.0;  // Pa/m
  SimState<> st;
  st.rho1 = ((7.0e6 - b * g.nodes_m.array()) / (sig1 * sig1)).matrix();
  st.rho2 = Eigen::VectorXd::Zero(7);
  const auto fp = flux_closure(st, 1.75, g, cfg);
  for (int i = 0; i < 6; ++i) {
    const double expect = std::sqrt(2 * diam / lam * st.rho1(i) * b);
    CHECK(fp.phi(i) == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK(fp.phi(6) == q_bar);

  // Reversed gradient reverses the flow.
  st.rho1 = ((1.0e6 + b * g.nodes_m.array()) / (sig1 * sig1)).matrix();
  const auto rev = flux_closure(st, 1.0, g, cfg);
  CHECK(rev.phi(0) < 0);
}

TEST_CASE("steady state against the closed form") {
  const PipeConfig<> cfg;
  const auto g = build_grid(16, ell);
  const ForcingParams<> f;
  const ControlParams<> c;
  const auto st = solve_steady(f, c, g, cfg, q_bar);

  const double s1 = 0.8 * p_bar / (sig1 * sig1);
  const double s2 = 0.2 * p_bar / (sig2 * sig2);
  const double c2 = p_bar / (s1 + s2);
  auto oracle = [&](double x) { return std::sqrt(std::pow(mu_bar * p_bar, 2) - lam * c2 * q_bar * q_bar * x / diam); };

  const Eigen::VectorXd p = pressure(st.rho1, st.rho2, cfg);
  CHECK(p(0) == doctest::Approx(7.0e6).epsilon(1e-15));
  CHECK(oracle(ell) == doctest::Approx(6.9376e6).epsilon(1e-4));
  CHECK(std::abs(p(16) - oracle(ell)) / oracle(ell) < 1e-3);
  for (int i = 0; i <= 16; ++i) CHECK(std::abs(p(i) - oracle(g.nodes_m(i))) / oracle(g.nodes_m(i)) < 1e-8);

  // Uniform composition equal to the source.
  for (int i = 0; i <= 16; ++i) CHECK(st.rho2(i) / (st.rho1(i) + st.rho2(i)) == doctest::Approx(s2 / (s1 + s2)));

  // Closure flux equals the withdrawal everywhere.
  const auto fp = flux_closure(st, mu_bar, g, cfg);
  CHECK((fp.phi.array() - q_bar).abs().maxCoeff() < 1e-6);
}

TEST_CASE("steady state is an equilibrium of the semi-discrete system") {
  const PipeConfig<> cfg;
  const auto g = build_grid(16, ell);
  const ForcingParams<> f{0.5, 0.0, 0.2};
  for (const double mu : {0.0, 0.006}) {
    const ControlParams<> c{mu_bar, mu};
    const auto st = solve_steady(f, c, g, cfg, q_bar);
    const double phi_ref = flux_closure(st, mu_bar, g, cfg).phi(0);
    GasPipeModel<> model(g, cfg, f, c, phi_ref);
    const Eigen::VectorXd y = interior_of(st);
    const Eigen::VectorXd dy = model.rhs(0.0, y);
    const double scale = q_bar * g.diff.cwiseAbs().maxCoeff();
    CHECK(dy.cwiseAbs().maxCoeff() < 1e-9 * scale);
    const auto obs = model.observe(0.0, y);
    CHECK(obs.u == doctest::Approx(mu_bar).epsilon(1e-10));
    CHECK(obs.phi_in == doctest::Approx(q_bar).epsilon(1e-8));
    CHECK(obs.p_out == doctest::Approx(pressure(st.rho1, st.rho2, cfg)(16)));
  }
}

TEST_CASE("withdrawal beyond capacity chokes") {
  const PipeConfig<> cfg;
  const auto g = build_grid(16, ell);
  CHECK_THROWS_AS((void)solve_steady(ForcingParams<>{}, ControlParams<>{}, g, cfg, 1000.0), ChokedFlow);
}

TEST_CASE("feedback law solved against bisection") {
  const PipeConfig<> cfg;
  const auto g = build_grid(16, ell);
  const ForcingParams<> f{0.5, 0.85, 0.2};
  const ControlParams<> c{mu_bar, 0.006};
  const auto st = solve_steady(f, c, g, cfg, q_bar);
  const Eigen::VectorXd y = interior_of(st);
  const double t = 0.5 * 3600.0;  // gamma = 0.37
  const double phi_ref = 75.0;

  // Independent evaluation of the inlet flux for a given compression ratio.
  const double gamma = 0.37;
  const double s1 = (1 - gamma) * p_bar / (sig1 * sig1);
  const double s2 = gamma * p_bar / (sig2 * sig2);
  const Eigen::VectorXd p_int = sig1 * sig1 * y.head(16) + sig2 * sig2 * y.tail(16);
  auto phi0 = [&](double u) {
    const double grad = g.diff(0, 0) * u * p_bar + g.diff.row(0).tail(16).dot(p_int);
    const double mag = std::sqrt(2 * diam / lam * u * (s1 + s2) * std::abs(grad));
    return grad > 0 ? -mag : mag;
  };
  auto resid = [&](double u) { return u - mu_bar + c.mu * (phi0(u) - phi_ref); };
  double lo = 1.0, hi = 3.0;
  REQUIRE(resid(lo) < 0);
  REQUIRE(resid(hi) > 0);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (resid(mid) > 0 ? hi : lo) = mid;
  }

  const auto sol = control_input(y, t, f, c, g, cfg, phi_ref);
  CHECK(sol.u == doctest::Approx(lo).epsilon(1e-11));
  CHECK(sol.phi0 == doctest::Approx(phi0(lo)).epsilon(1e-9));

  const auto open = control_input(y, t, f, ControlParams<>{mu_bar, 0.0}, g, cfg, phi_ref);
  CHECK(open.u == mu_bar);
  CHECK(open.phi0 == doctest::Approx(phi0(mu_bar)).epsilon(1e-12));
}

TEST_CASE("infeasible feedback is reported") {
  const PipeConfig<> cfg;
  const auto g = build_grid(8, ell);
  const ForcingParams<> f;
  const ControlParams<> c{mu_bar, 0.5};
  const auto st = solve_steady(f, c, g, cfg, q_bar);
  // A reference far below any reachable flux leaves no root in the bracket.
  CHECK_THROWS_AS((void)control_input(interior_of(st), 0.0, f, c, g, cfg, -1.0e9), ControllerInfeasible);
}

TEST_CASE("admissibility checks total density") {
  const PipeConfig<> cfg;
  const auto g = build_grid(4, ell);
  GasPipeModel<> model(g, cfg, ForcingParams<>{}, ControlParams<>{}, q_bar);
  Eigen::VectorXd y(8);
  y << 40, 40, 40, 40, 0.5, -0.1, 0.5, 0.5;
  CHECK(model.admissible(y));
  y(1) = 0.05;
  CHECK_FALSE(model.admissible(y));
}
