#include "h2pipe/chaos_metrics.hpp"

#include "h2pipe/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace h2pipe {

std::string_view to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::done:
      return "done";
    case RecordStatus::failed:
      return "failed";
    case RecordStatus::skipped:
      return "skipped";
  }
  return "unknown";
}

std::optional<RecordStatus> parse_record_status(std::string_view s) {
  if (s == "done") return RecordStatus::done;
  if (s == "failed") return RecordStatus::failed;
  if (s == "skipped") return RecordStatus::skipped;
  return std::nullopt;
}

std::string_view to_string(InterfaceStatus s) {
  switch (s) {
    case InterfaceStatus::found:
      return "found";
    case InterfaceStatus::no_chaos:
      return "no_chaos_in_range";
    case InterfaceStatus::incomplete:
      return "incomplete";
  }
  return "unknown";
}

ChaosResult combine_channels(double c_rho1, double c_rho2, double c_p, double threshold) {
  ChaosResult r;
  r.C_rho1 = c_rho1;
  r.C_rho2 = c_rho2;
  r.C_p = c_p;
  r.C = std::min({c_rho1, c_rho2, c_p});
  r.chaotic = r.C > threshold;
  return r;
}

ChaosResult chaos_measure(const Trajectory<double>& traj1, const Trajectory<double>& traj2,
                          const ChaosExperimentConfig& ecfg) {
  if (traj1.size() != traj2.size() || traj1.sample_times_s != traj2.sample_times_s) {
    throw std::invalid_argument("chaos_measure: trajectories do not share a sample grid");
  }
  return combine_channels(divergence_measure(traj1.rho1_out, traj2.rho1_out, ecfg),
                          divergence_measure(traj1.rho2_out, traj2.rho2_out, ecfg),
                          divergence_measure(traj1.p_out, traj2.p_out, ecfg), ecfg.threshold_C);
}

void ExperimentSetup::validate() const {
  pipe.validate();
  forcing.validate();
  control.validate();
  integrator.validate();
  if (order < 1) throw std::invalid_argument("ExperimentSetup: order must be >= 1");
  if (!(horizon_hr > 0)) throw std::invalid_argument("ExperimentSetup: horizon must be positive");
  if (n_intervals < 2) throw std::invalid_argument("ExperimentSetup: need at least 2 sample intervals");
  chaos.validate(n_intervals);
}

Trajectory<double> simulate(const OperatingPoint& point, const ExperimentSetup& setup, double q_init) {
  ForcingParams<double> forcing = setup.forcing;
  forcing.omega_cyc_per_hr = point.omega_cyc_per_hr;
  forcing.kappa = point.kappa;
  ControlParams<double> control = setup.control;
  control.mu = point.mu;
  forcing.validate();
  control.validate();
  setup.pipe.validate();

  auto grid = build_grid<double>(setup.order, setup.pipe.length_m);
  const SimState<double> initial = solve_steady(forcing, control, grid, setup.pipe, q_init);
  const double phi_ref = flux_closure(initial, control.mu_bar, grid, setup.pipe).phi(0);
  GasPipeModel<double> model(std::move(grid), setup.pipe, forcing, control, phi_ref);
  return integrate(model, interior_of(initial), units::hr_to_s(setup.horizon_hr), setup.n_intervals,
                   setup.integrator);
}

PairOutcome pair_simulate(const OperatingPoint& point, const ExperimentSetup& setup, bool keep_trajectories) {
  setup.validate();
  ForcingParams<double> forcing = setup.forcing;
  forcing.omega_cyc_per_hr = point.omega_cyc_per_hr;
  forcing.kappa = point.kappa;
  forcing.validate();
  ControlParams<double> control = setup.control;
  control.mu = point.mu;
  control.validate();

  PairOutcome out;
  const double q = setup.pipe.withdrawal_flux;
  std::optional<Trajectory<double>> runs[2];
  const double q_init[2] = {q, q + setup.chaos.delta_q};
  for (int member = 0; member < 2; ++member) {
    try {
      runs[member] = simulate(point, setup, q_init[member]);
    } catch (const IntegrationFailure& e) {
      out.failed_member = member + 1;
      out.failure = std::string(e.what()) + " at t = " + std::to_string(e.time_s()) + " s";
      return out;
    } catch (const std::exception& e) {
      // Steady-solve, controller, forcing and numerical failures.
      out.failed_member = member + 1;
      out.failure = e.what();
      return out;
    }
  }
  out.result = chaos_measure(*runs[0], *runs[1], setup.chaos);
  out.ok = true;
  if (keep_trajectories) {
    out.traj1 = std::move(runs[0]);
    out.traj2 = std::move(runs[1]);
  }
  return out;
}

namespace {

double interpolate_at(std::span<const double> times, std::span<const double> values, double t) {
  const auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return values.front();
  if (it == times.end()) return values.back();
  const auto hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  if (*it == t) return values[hi];
  const double s = (t - times[lo]) / (times[hi] - times[lo]);
  return values[lo] + s * (values[hi] - values[lo]);
}

int count_clusters(std::vector<double> v, double tol) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  int clusters = 1;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] - v[i - 1] > tol) ++clusters;
  }
  return clusters;
}

}  // namespace

int orbit_period_multiplier(std::span<const double> times, std::span<const double> values,
                            double omega_cyc_per_s, double t_a, double t_b) {
  constexpr int max_clusters = 8;
  constexpr int phases = 8;
  constexpr double rel_tol = 1e-3;

  if (times.size() != values.size() || times.size() < 2) {
    throw std::invalid_argument("orbit_period_multiplier: times and values must match");
  }
  if (!(omega_cyc_per_s > 0)) throw std::invalid_argument("orbit_period_multiplier: omega must be > 0");
  if (!(t_a >= times.front() && t_b <= times.back() && t_b > t_a)) {
    throw std::invalid_argument("orbit_period_multiplier: window outside the series");
  }
  const double period = 1.0 / omega_cyc_per_s;
  if ((t_b - t_a) < 8.0 * period * (1.0 - 1e-12)) {
    throw std::invalid_argument("orbit_period_multiplier: window shorter than 8 forcing periods");
  }

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= t_a && times[k] <= t_b) {
      lo = std::min(lo, values[k]);
      hi = std::max(hi, values[k]);
    }
  }
  const double range = hi - lo;
  if (!(range > 0)) return 1;
  const double tol = rel_tol * range;

  // A subharmonic can vanish at one strobe phase, so several phases are tried.
  int best = 0;
  for (int j = 0; j < phases; ++j) {
    std::vector<double> strobes;
    for (int k = 0;; ++k) {
      const double t = t_a + (static_cast<double>(j) / phases + k) * period;
      if (t > t_b) break;
      strobes.push_back(interpolate_at(times, values, t));
    }
    const int c = count_clusters(std::move(strobes), tol);
    if (c > max_clusters) return 0;
    best = std::max(best, c);
  }
  return best;
}

int orbit_period_multiplier(const Trajectory<double>& traj, double omega_cyc_per_hr, double t_a_s,
                            double t_b_s) {
  const std::span<const double> times(traj.sample_times_s.data(),
                                      static_cast<std::size_t>(traj.sample_times_s.size()));
  const std::span<const double> values(traj.p_out.data(), static_cast<std::size_t>(traj.p_out.size()));
  return orbit_period_multiplier(times, values, omega_cyc_per_hr / units::seconds_per_hour, t_a_s, t_b_s);
}

InterfacePoint interface_column(std::span<const std::optional<double>> c_values,
                                std::span<const double> kappa_grid, double threshold) {
  if (c_values.empty() || c_values.size() != kappa_grid.size()) {
    throw std::invalid_argument("interface_column: empty column or size mismatch");
  }
  InterfacePoint pt;
  for (const auto& c : c_values) {
    if (!c) {
      pt.status = InterfaceStatus::incomplete;
      return pt;
    }
  }
  const std::size_t n = c_values.size();
  if (!(*c_values[n - 1] > threshold)) {
    pt.status = InterfaceStatus::no_chaos;
    return pt;
  }
  // Scan down from the top while every value stays above threshold.
  std::size_t j = n - 1;
  while (j > 0 && *c_values[j - 1] > threshold) --j;
  pt.status = InterfaceStatus::found;
  pt.kappa_star = j == 0 ? kappa_grid[0] : kappa_grid[j - 1];
  return pt;
}

InterfaceCurve interface_extract(std::span<const SweepRecord> records, std::span<const double> omega_grid,
                                 std::span<const double> kappa_grid, double threshold) {
  if (omega_grid.empty() || kappa_grid.empty()) {
    throw std::invalid_argument("interface_extract: empty grid");
  }
  InterfaceCurve curve;
  if (!records.empty()) curve.mu = records.front().mu;

  std::map<std::pair<double, double>, const SweepRecord*> by_key;
  for (const auto& r : records) by_key[{r.omega_cyc_per_hr, r.kappa}] = &r;

  std::vector<double> xs;
  std::vector<double> ys;
  for (const double omega : omega_grid) {
    std::vector<std::optional<double>> column;
    column.reserve(kappa_grid.size());
    for (const double kappa : kappa_grid) {
      const auto it = by_key.find({omega, kappa});
      if (it == by_key.end() || it->second->status == RecordStatus::failed) {
        column.emplace_back(std::nullopt);
      } else if (it->second->status == RecordStatus::skipped || !it->second->result) {
        column.emplace_back(-std::numeric_limits<double>::infinity());
      } else {
        column.emplace_back(it->second->result->C);
      }
    }
    InterfacePoint pt = interface_column(column, kappa_grid, threshold);
    pt.omega_cyc_per_hr = omega;
    curve.columns.push_back(pt);
    if (pt.status == InterfaceStatus::found) {
      xs.push_back(omega);
      ys.push_back(pt.kappa_star);
    }
  }
  if (xs.size() >= 2) {
    curve.spline.emplace(Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                         Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size())));
  }
  return curve;
}

}  // namespace h2pipe
