// Divergence of paired trajectories, chaos classification, orbit period
// detection, and chaotic-interface extraction over a forcing grid.

#ifndef H2PIPE_CHAOS_METRICS_HPP
#define H2PIPE_CHAOS_METRICS_HPP

#include "h2pipe/chebyshev.hpp"
#include "h2pipe/gas_model.hpp"
#include "h2pipe/integrator.hpp"
#include "h2pipe/monotone_spline.hpp"
#include "h2pipe/sweep_record.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace h2pipe {

/// Perturbation size, averaging windows (as fractions of N), and threshold.
struct ChaosExperimentConfig {
  double delta_q = 0.1;
  double i0_begin = 0.08;
  double i0_end = 0.15;
  double it_begin = 0.5;
  double it_end = 0.8;
  double threshold_C = 0.5;
  double log_floor = 1e-30;

  struct Windows {
    Eigen::Index n0, n1, n2, n3;  // inclusive sample-index bounds
  };

  [[nodiscard]] Windows windows(Eigen::Index n_intervals) const {
    auto at = [&](double frac) {
      return static_cast<Eigen::Index>(std::llround(frac * static_cast<double>(n_intervals)));
    };
    return {at(i0_begin), at(i0_end), at(it_begin), at(it_end)};
  }

  void validate(Eigen::Index n_intervals) const {
    const auto w = windows(n_intervals);
    if (!(w.n0 >= 0 && w.n0 < w.n1 && w.n1 < w.n2 && w.n2 < w.n3 && w.n3 <= n_intervals)) {
      throw std::invalid_argument("ChaosExperimentConfig: windows must satisfy n0 < n1 < n2 < n3 <= N");
    }
    if (!(delta_q > 0)) throw std::invalid_argument("ChaosExperimentConfig: delta_q must be positive");
    if (!(threshold_C > 0)) throw std::invalid_argument("ChaosExperimentConfig: threshold must be positive");
    if (!(log_floor > 0)) throw std::invalid_argument("ChaosExperimentConfig: log_floor must be positive");
  }
};

/// Mean of log|psi2 - psi1| over the late window minus the same over the early
/// window. Differences are floored at log_floor before the logarithm.
template <typename D1, typename D2>
[[nodiscard]] typename D1::Scalar divergence_measure(const Eigen::MatrixBase<D1>& psi1,
                                                     const Eigen::MatrixBase<D2>& psi2,
                                                     const ChaosExperimentConfig& ecfg) {
  using Scalar = typename D1::Scalar;
  if (psi1.size() != psi2.size() || psi1.size() < 2) {
    throw std::invalid_argument("divergence_measure: series must have equal length >= 2");
  }
  const Eigen::Index n_intervals = psi1.size() - 1;
  ecfg.validate(n_intervals);
  const auto w = ecfg.windows(n_intervals);
  auto window_mean = [&](Eigen::Index a, Eigen::Index b) {
    Scalar sum = 0;
    for (Eigen::Index k = a; k <= b; ++k) {
      sum += std::log(std::max(std::abs(psi2(k) - psi1(k)), Scalar(ecfg.log_floor)));
    }
    return sum / Scalar(b - a + 1);
  };
  return window_mean(w.n2, w.n3) - window_mean(w.n0, w.n1);
}

[[nodiscard]] ChaosResult combine_channels(double c_rho1, double c_rho2, double c_p, double threshold);

/// Channels are outlet rho1, rho2 and pressure.
[[nodiscard]] ChaosResult chaos_measure(const Trajectory<double>& traj1, const Trajectory<double>& traj2,
                                        const ChaosExperimentConfig& ecfg);

/// Everything a pair experiment needs apart from the operating point.
struct ExperimentSetup {
  PipeConfig<double> pipe;
  ForcingParams<double> forcing;  // omega and kappa are overwritten per point
  ControlParams<double> control;  // mu is overwritten per point
  ChaosExperimentConfig chaos;
  IntegratorConfig integrator;
  int order = 16;
  double horizon_hr = 100.0;
  int n_intervals = 10000;

  void validate() const;
};

struct OperatingPoint {
  double omega_cyc_per_hr = 0;
  double kappa = 0;
  double mu = 0;
};

/// Single run from the steady state at withdrawal q_init; the runtime
/// withdrawal stays at the configured value.
[[nodiscard]] Trajectory<double> simulate(const OperatingPoint& point, const ExperimentSetup& setup,
                                          double q_init);

struct PairOutcome {
  bool ok = false;
  ChaosResult result;
  int failed_member = 0;  // 1 or 2 when !ok
  std::string failure;
  std::optional<Trajectory<double>> traj1;
  std::optional<Trajectory<double>> traj2;
};

/// Two runs from steady states at q and q + delta_q under identical forcing.
/// Failures are reported in the outcome rather than thrown.
[[nodiscard]] PairOutcome pair_simulate(const OperatingPoint& point, const ExperimentSetup& setup,
                                        bool keep_trajectories = false);

/// Number of distinct strobe clusters of `values` sampled once per forcing
/// period inside [t_a, t_b]; 0 when more than 8 clusters appear (aperiodic).
[[nodiscard]] int orbit_period_multiplier(std::span<const double> times, std::span<const double> values,
                                          double omega_cyc_per_s, double t_a, double t_b);

/// Outlet-pressure version on a trajectory; omega in cycles per hour, window in seconds.
[[nodiscard]] int orbit_period_multiplier(const Trajectory<double>& traj, double omega_cyc_per_hr,
                                          double t_a_s, double t_b_s);

enum class InterfaceStatus { found, no_chaos, incomplete };

[[nodiscard]] std::string_view to_string(InterfaceStatus s);

struct InterfacePoint {
  double omega_cyc_per_hr = 0;
  double kappa_star = 0;  // meaningful when status == found
  InterfaceStatus status = InterfaceStatus::no_chaos;
};

struct InterfaceCurve {
  double mu = 0;
  std::vector<InterfacePoint> columns;
  std::optional<MonotoneSpline<double>> spline;  // over `found` columns, when >= 2
};

/// kappa*(omega) for one gain from a complete (omega x kappa) grid of records.
[[nodiscard]] InterfaceCurve interface_extract(std::span<const SweepRecord> records,
                                               std::span<const double> omega_grid,
                                               std::span<const double> kappa_grid, double threshold);

/// Column rule alone: C values ordered by increasing kappa, nullopt entries are
/// unknown. Returns the interface point with omega left at 0.
[[nodiscard]] InterfacePoint interface_column(std::span<const std::optional<double>> c_values,
                                              std::span<const double> kappa_grid, double threshold);

}  // namespace h2pipe

#endif  // H2PIPE_CHAOS_METRICS_HPP
