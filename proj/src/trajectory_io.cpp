#include "h2pipe/trajectory_io.hpp"

#include "h2pipe/units.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>
#include <vector>

namespace h2pipe {

TrajectoryTable TrajectoryTable::from(const Trajectory<double>& traj) {
  TrajectoryTable t;
  t.t_hr = traj.sample_times_s / units::seconds_per_hour;
  t.rho1_out = traj.rho1_out;
  t.rho2_out = traj.rho2_out;
  t.p_out_mpa = traj.p_out / units::pascals_per_mpa;
  t.phi_in = traj.phi_in;
  t.u = traj.u;
  return t;
}

std::string trajectory_csv(const TrajectoryTable& table) {
  fmt::memory_buffer out;
  fmt::format_to(std::back_inserter(out), "{}\n", trajectory_csv_header);
  for (Eigen::Index k = 0; k < table.size(); ++k) {
    fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{}\n", table.t_hr(k), table.rho1_out(k),
                   table.rho2_out(k), table.p_out_mpa(k), table.phi_in(k), table.u(k));
  }
  return fmt::to_string(out);
}

TrajectoryTable parse_trajectory_csv(std::string_view text) {
  std::vector<double> cols[6];
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != trajectory_csv_header) throw std::runtime_error("trajectory CSV: unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int c = 0; c < 6; ++c) {
      double v = 0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        throw std::runtime_error(fmt::format("trajectory CSV line {}: bad number in column {}", line_no, c + 1));
      }
      p = res.ptr;
      if (c < 5) {
        if (p == end || *p != ',') {
          throw std::runtime_error(fmt::format("trajectory CSV line {}: expected 6 columns", line_no));
        }
        ++p;
      }
      cols[c].push_back(v);
    }
    if (p != end) throw std::runtime_error(fmt::format("trajectory CSV line {}: trailing data", line_no));
  }
  if (line_no == 0) throw std::runtime_error("trajectory CSV: empty file");
  auto vec = [](const std::vector<double>& v) {
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  return {vec(cols[0]), vec(cols[1]), vec(cols[2]), vec(cols[3]), vec(cols[4]), vec(cols[5])};
}

TrajectoryTable read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read trajectory '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trajectory_csv(buf.str());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += fmt::format(".tmp{}", static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace h2pipe
