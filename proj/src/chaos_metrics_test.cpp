#include "h2pipe/chaos_metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace h2pipe;

namespace {

Eigen::VectorXd wiggle(int n) {
  Eigen::VectorXd v(n);
  for (int k = 0; k < n; ++k) v(k) = 3.0 + std::sin(0.37 * k) + 0.1 * std::cos(1.9 * k);
  return v;
}

Trajectory<double> synthetic_traj(int n, double phase) {
  Trajectory<double> t;
  t.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    t.sample_times_s(k) = 10.0 * k;
    t.rho1_out(k) = 40 + std::sin(0.01 * k + phase);
    t.rho2_out(k) = 0.7 + 0.1 * std::exp(0.002 * k * (1 + phase));
    t.p_out(k) = 6.9e6 + 1e3 * std::cos(0.03 * k * (1 + phase));
    t.phi_in(k) = 75;
    t.u(k) = 1.75;
  }
  return t;
}

}  // namespace

TEST_CASE("window bounds") {
  const ChaosExperimentConfig cfg;
  const auto w = cfg.windows(10000);
  CHECK(w.n0 == 800);
  CHECK(w.n1 == 1500);
  CHECK(w.n2 == 5000);
  CHECK(w.n3 == 8000);
  ChaosExperimentConfig bad;
  bad.it_end = 1.2;
  CHECK_THROWS_AS(bad.validate(100), std::invalid_argument);
}

TEST_CASE("divergence of trivial pairs") {
  const ChaosExperimentConfig cfg;
  const Eigen::VectorXd a = wiggle(101);
  CHECK(std::abs(divergence_measure(a, a, cfg)) < 1e-12);  // floored logs cancel
  const Eigen::VectorXd b = (a.array() + 0.25).matrix();
  CHECK(std::abs(divergence_measure(a, b, cfg)) < 1e-14);
}

TEST_CASE("exponential separation") {
  const ChaosExperimentConfig cfg;
  const int n = 100;
  const double dt = 0.5, lam = 0.09, eps = 1e-6;
  const Eigen::VectorXd a = wiggle(n + 1);
  Eigen::VectorXd b(n + 1);
  for (int k = 0; k <= n; ++k) b(k) = a(k) + eps * std::exp(lam * k * dt);
  // Inclusive index windows [8, 15] and [50, 80] for N = 100.
  auto mean_t = [&](int lo, int hi) {
    double s = 0;
    for (int k = lo; k <= hi; ++k) s += k * dt;
    return s / (hi - lo + 1);
  };
  const double expect = lam * (mean_t(50, 80) - mean_t(8, 15));
  CHECK(std::abs(divergence_measure(a, b, cfg) - expect) < 1e-10);
  // Independent of eps.
  Eigen::VectorXd c(n + 1);
  for (int k = 0; k <= n; ++k) c(k) = a(k) - 1e-3 * std::exp(lam * k * dt);
  CHECK(std::abs(divergence_measure(a, c, cfg) - expect) < 1e-10);
}

TEST_CASE("shift and scale invariance") {
  const ChaosExperimentConfig cfg;
  const Eigen::VectorXd a = wiggle(201);
  Eigen::VectorXd b = a;
  for (int k = 0; k < b.size(); ++k) b(k) += 1e-2 * std::exp(0.02 * k) * (1 + 0.3 * std::sin(k));
  const double base = divergence_measure(a, b, cfg);
  for (const double shift : {-5.0, 2.5, 40.0}) {
    CHECK(std::abs(divergence_measure((a.array() + shift).matrix(), (b.array() + shift).matrix(), cfg) - base) <
          1e-12 * std::max(1.0, std::abs(base)));
  }
  for (const double scale : {0.01, 7.0, 1e6}) {
    CHECK(std::abs(divergence_measure(a * scale, b * scale, cfg) - base) < 1e-12 * std::max(1.0, std::abs(base)));
  }
}

TEST_CASE("channel combination and threshold") {
  const auto r = combine_channels(0.7, 1.2, 0.6, 0.5);
  CHECK(r.C == 0.6);
  CHECK(r.chaotic);
  CHECK_FALSE(combine_channels(0.5, 2.0, 3.0, 0.5).chaotic);  // tie is not chaotic
  CHECK_FALSE(combine_channels(-1.0, 2.0, 3.0, 0.5).chaotic);
}

TEST_CASE("chaos measure is symmetric") {
  const ChaosExperimentConfig cfg;
  const auto t1 = synthetic_traj(1000, 0.0);
  const auto t2 = synthetic_traj(1000, 0.05);
  const auto a = chaos_measure(t1, t2, cfg);
  const auto b = chaos_measure(t2, t1, cfg);
  CHECK(a == b);
  auto t3 = synthetic_traj(1000, 0.0);
  t3.sample_times_s(3) += 1;
  CHECK_THROWS_AS((void)chaos_measure(t1, t3, cfg), std::invalid_argument);
}

TEST_CASE("period multiplier of synthetic signals") {
  const double w = 0.5 / 3600.0;  // cyc/s
  const int n = 10000;
  const double horizon = 100 * 3600.0;
  std::vector<double> t(n + 1), one(n + 1), two(n + 1), quasi(n + 1);
  for (int k = 0; k <= n; ++k) {
    t[k] = horizon * k / n;
    const double x = 2 * std::numbers::pi * w * t[k];
    one[k] = std::sin(x);
    two[k] = std::sin(x) + 0.5 * std::sin(x / 2);
    quasi[k] = std::sin(x) + 0.5 * std::sin(std::numbers::sqrt2 * x);
  }
  const double ta = 75 * 3600.0, tb = 100 * 3600.0;
  CHECK(orbit_period_multiplier(t, one, w, ta, tb) == 1);
  CHECK(orbit_period_multiplier(t, two, w, ta, tb) == 2);
  CHECK(orbit_period_multiplier(t, quasi, w, ta, tb) == 0);
  CHECK_THROWS_AS((void)orbit_period_multiplier(t, one, w, 95 * 3600.0, tb), std::invalid_argument);
  CHECK_THROWS_AS((void)orbit_period_multiplier(t, one, w, ta, 120 * 3600.0), std::invalid_argument);
}

TEST_CASE("interface column rule") {
  const std::vector<double> kappa{0.5, 0.625, 0.75, 0.875, 1.0};
  using C = std::vector<std::optional<double>>;
  auto col = [&](const C& c, double thr = 0.5) { return interface_column(c, kappa, thr); };

  auto pt = col({0.1, 0.2, 0.7, 0.8, 0.9});
  CHECK(pt.status == InterfaceStatus::found);
  CHECK(pt.kappa_star == 0.625);

  CHECK(col({0.1, 0.2, 0.3, 0.4, 0.5}).status == InterfaceStatus::no_chaos);
  pt = col({0.6, 0.7, 0.8, 0.9, 1.0});
  CHECK(pt.status == InterfaceStatus::found);
  CHECK(pt.kappa_star == 0.5);
  // A dip below threshold above a chaotic cell moves kappa* up.
  CHECK(col({0.9, 0.9, 0.2, 0.9, 0.9}).kappa_star == 0.75);
  CHECK(col({0.9, std::nullopt, 0.9, 0.9, 0.9}).status == InterfaceStatus::incomplete);
  CHECK_THROWS_AS((void)interface_column(C{}, std::span<const double>{}, 0.5), std::invalid_argument);

  // Raising the threshold never lowers kappa*.
  const C c{0.3, 0.55, 0.45, 0.8, 1.4};
  double prev = -1;
  for (const double thr : {0.2, 0.4, 0.5, 0.6, 1.0}) {
    const auto p = col(c, thr);
    const double k = p.status == InterfaceStatus::found ? p.kappa_star : 2.0;
    CHECK(k >= prev);
    prev = k;
  }
}

TEST_CASE("interface extraction over a grid") {
  const std::vector<double> omega{0.0, 0.5, 1.0, 1.5, 2.0};
  const std::vector<double> kappa{0.25, 0.375, 0.5, 0.625, 0.75};
  std::vector<SweepRecord> recs;
  for (const double w : omega) {
    for (const double k : kappa) {
      SweepRecord r;
      r.omega_cyc_per_hr = w;
      r.kappa = k;
      r.mu = 0.006;
      if (w == 0.0) {
        r.status = RecordStatus::skipped;
      } else {
        r.status = RecordStatus::done;
        r.result = combine_channels(k, k, k, 0.5);  // C = kappa
      }
      recs.push_back(r);
    }
  }
  auto curve = interface_extract(recs, omega, kappa, 0.5);
  CHECK(curve.mu == 0.006);
  REQUIRE(curve.columns.size() == 5);
  CHECK(curve.columns[0].status == InterfaceStatus::no_chaos);
  for (std::size_t i = 1; i < 5; ++i) {
    CHECK(curve.columns[i].status == InterfaceStatus::found);
    CHECK(curve.columns[i].kappa_star == 0.5);
  }
  REQUIRE(curve.spline);
  CHECK((*curve.spline)(0.8) == doctest::Approx(0.5));

  // A failed cell marks its column incomplete.
  recs[2 * 5 + 1].status = RecordStatus::failed;
  recs[2 * 5 + 1].result.reset();
  curve = interface_extract(recs, omega, kappa, 0.5);
  CHECK(curve.columns[2].status == InterfaceStatus::incomplete);
  REQUIRE(curve.spline);
  CHECK(curve.spline->knots_x().size() == 3);
}

TEST_CASE("steady forcing pair is not chaotic") {
  ExperimentSetup s;
  s.horizon_hr = 10;
  s.n_intervals = 1000;
  const auto out = pair_simulate({0.5, 0.0, 0.0}, s, true);
  REQUIRE(out.ok);
  CHECK(out.result.C <= 0);
  CHECK_FALSE(out.result.chaotic);
  REQUIRE(out.traj1);
  CHECK(out.traj1->size() == 1001);
}

TEST_CASE("invalid operating point is rejected up front") {
  ExperimentSetup s;
  CHECK_THROWS_AS((void)pair_simulate({0.5, 1.5, 0.0}, s), std::invalid_argument);
  CHECK_THROWS_AS((void)pair_simulate({0.5, 0.5, -1.0}, s), std::invalid_argument);
}
