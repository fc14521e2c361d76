// Trajectory CSV in user units and atomic file output.

#ifndef H2PIPE_TRAJECTORY_IO_HPP
#define H2PIPE_TRAJECTORY_IO_HPP

#include "h2pipe/integrator.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>

namespace h2pipe {

inline constexpr std::string_view trajectory_csv_header = "t_hr,rho1_out,rho2_out,p_out_mpa,phi_in,u";

/// Columns as they appear in the CSV (hours, MPa).
struct TrajectoryTable {
  Eigen::VectorXd t_hr;
  Eigen::VectorXd rho1_out;
  Eigen::VectorXd rho2_out;
  Eigen::VectorXd p_out_mpa;
  Eigen::VectorXd phi_in;
  Eigen::VectorXd u;

  [[nodiscard]] Eigen::Index size() const { return t_hr.size(); }
  [[nodiscard]] static TrajectoryTable from(const Trajectory<double>& traj);
};

/// Shortest round-trip formatting, one row per sample.
[[nodiscard]] std::string trajectory_csv(const TrajectoryTable& table);
[[nodiscard]] TrajectoryTable parse_trajectory_csv(std::string_view text);
[[nodiscard]] TrajectoryTable read_trajectory_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// see either the old file, the complete new file, or nothing.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace h2pipe

#endif  // H2PIPE_TRAJECTORY_IO_HPP
