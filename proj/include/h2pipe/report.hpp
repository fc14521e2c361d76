// Interface tables and figures built from sweep stores and trajectories.

#ifndef H2PIPE_REPORT_HPP
#define H2PIPE_REPORT_HPP

#include "h2pipe/chaos_metrics.hpp"
#include "h2pipe/sweep_record.hpp"
#include "h2pipe/trajectory_io.hpp"

#include <span>
#include <string>
#include <vector>

namespace h2pipe {

struct GainInterface {
  double mu = 0;
  std::vector<double> omega_grid;  // taken from the store
  std::vector<double> kappa_grid;
  InterfaceCurve curve;
};

/// One interface per distinct gain in the records, gains ascending.
[[nodiscard]] std::vector<GainInterface> interfaces_by_gain(std::span<const SweepRecord> records, double threshold);

/// Columns omega_cyc_per_hr,kappa_star,status; kappa_star is "nan" unless found.
[[nodiscard]] std::string interface_csv(const GainInterface& gi);

/// All gains' spline curves (knots marked) in the (omega, kappa) plane.
[[nodiscard]] std::string interface_svg(std::span<const GainInterface> interfaces);

/// Outlet p vs rho2 and rho1 vs rho2 over [t_start_hr, t_end_hr].
/// Throws std::out_of_range when the window is not covered by the table.
[[nodiscard]] std::string phase_portrait_svg(const TrajectoryTable& table, double t_start_hr, double t_end_hr);

}  // namespace h2pipe

#endif  // H2PIPE_REPORT_HPP
