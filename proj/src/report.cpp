#include "h2pipe/report.hpp"

#include "h2pipe/svg_plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <set>
#include <stdexcept>

namespace h2pipe {

std::vector<GainInterface> interfaces_by_gain(std::span<const SweepRecord> records, double threshold) {
  std::map<double, std::vector<SweepRecord>> groups;
  for (const auto& r : records) groups[r.mu].push_back(r);

  std::vector<GainInterface> out;
  for (auto& [mu, recs] : groups) {
    std::set<double> omegas, kappas;
    for (const auto& r : recs) {
      omegas.insert(r.omega_cyc_per_hr);
      kappas.insert(r.kappa);
    }
    GainInterface gi;
    gi.mu = mu;
    gi.omega_grid.assign(omegas.begin(), omegas.end());
    gi.kappa_grid.assign(kappas.begin(), kappas.end());
    gi.curve = interface_extract(recs, gi.omega_grid, gi.kappa_grid, threshold);
    gi.curve.mu = mu;
    out.push_back(std::move(gi));
  }
  return out;
}

std::string interface_csv(const GainInterface& gi) {
  std::string out = "omega_cyc_per_hr,kappa_star,status\n";
  for (const auto& c : gi.curve.columns) {
    if (c.status == InterfaceStatus::found) {
      out += fmt::format("{},{},{}\n", c.omega_cyc_per_hr, c.kappa_star, to_string(c.status));
    } else {
      out += fmt::format("{},nan,{}\n", c.omega_cyc_per_hr, to_string(c.status));
    }
  }
  return out;
}

std::string interface_svg(std::span<const GainInterface> interfaces) {
  svg::Panel panel;
  panel.title = "Chaotic interface";
  panel.x_label = "omega [cyc/hr]";
  panel.y_label = "kappa";
  std::vector<double> om, ka;
  for (const auto& gi : interfaces) {
    om.insert(om.end(), gi.omega_grid.begin(), gi.omega_grid.end());
    ka.insert(ka.end(), gi.kappa_grid.begin(), gi.kappa_grid.end());
  }
  if (!om.empty()) {
    const auto [olo, ohi] = std::minmax_element(om.begin(), om.end());
    const auto [klo, khi] = std::minmax_element(ka.begin(), ka.end());
    panel.x_range = svg::padded_range(std::vector<double>{*olo, *ohi}, 0.03);
    panel.y_range = svg::padded_range(std::vector<double>{*klo, *khi}, 0.03);
  }
  static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  for (std::size_t g = 0; g < interfaces.size(); ++g) {
    const GainInterface& gi = interfaces[g];
    svg::Series s;
    s.label = fmt::format("mu = {}", gi.mu);
    s.color = colors[g % std::size(colors)];
    if (gi.curve.spline) {
      const auto& sp = *gi.curve.spline;
      const double a = sp.knots_x()(0);
      const double b = sp.knots_x()(sp.knots_x().size() - 1);
      constexpr int samples = 200;
      for (int k = 0; k <= samples; ++k) {
        const double x = a + (b - a) * k / samples;
        s.x.push_back(x);
        s.y.push_back(sp(x));
      }
      svg::Series knots;
      knots.color = s.color;
      knots.markers = true;
      for (Eigen::Index k = 0; k < sp.knots_x().size(); ++k) {
        knots.x.push_back(sp.knots_x()(k));
        knots.y.push_back(sp.knots_y()(k));
      }
      panel.series.push_back(std::move(s));
      panel.series.push_back(std::move(knots));
    } else {
      // Legend entry only; a single found column is drawn as a point.
      for (const auto& c : gi.curve.columns) {
        if (c.status == InterfaceStatus::found) {
          s.x.push_back(c.omega_cyc_per_hr);
          s.y.push_back(c.kappa_star);
        }
      }
      panel.series.push_back(std::move(s));
    }
  }
  const svg::Panel panels[] = {panel};
  return svg::render(panels);
}

std::string phase_portrait_svg(const TrajectoryTable& table, double t_start_hr, double t_end_hr) {
  if (table.size() == 0 || !(t_end_hr > t_start_hr) || t_start_hr < table.t_hr(0) ||
      t_end_hr > table.t_hr(table.size() - 1)) {
    throw std::out_of_range(fmt::format("window [{}, {}] hr is not covered by the trajectory", t_start_hr, t_end_hr));
  }
  svg::Series pr, rr;
  for (Eigen::Index k = 0; k < table.size(); ++k) {
    const double t = table.t_hr(k);
    if (t < t_start_hr || t > t_end_hr) continue;
    pr.x.push_back(table.rho2_out(k));
    pr.y.push_back(table.p_out_mpa(k));
    rr.x.push_back(table.rho2_out(k));
    rr.y.push_back(table.rho1_out(k));
  }
  const std::string title = fmt::format("outlet, t in [{}, {}] hr", t_start_hr, t_end_hr);
  svg::Panel a{title, "rho2 [kg/m^3]", "p [MPa]", {pr}, {}, {}};
  svg::Panel b{title, "rho2 [kg/m^3]", "rho1 [kg/m^3]", {rr}, {}, {}};
  const svg::Panel panels[] = {a, b};
  return svg::render(panels);
}

}  // namespace h2pipe
