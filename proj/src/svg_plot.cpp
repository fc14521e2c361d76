#include "h2pipe/svg_plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>

namespace h2pipe::svg {

namespace {

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tick_label(double v, double step) {
  if (std::abs(v) < step * 1e-9) v = 0;
  const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
  return fmt::format("{:.{}f}", v, decimals);
}

}  // namespace

Range padded_range(std::span<const double> values, double pad) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const double v : values) {
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo <= hi)) return {0.0, 1.0};
  if (hi == lo) {
    const double half = std::max(std::abs(lo) * pad, pad);
    return {lo - half, hi + half};
  }
  const double w = hi - lo;
  return {lo - pad * w, hi + pad * w};
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
  std::vector<double> ticks;
  if (!(hi > lo) || target < 1) return ticks;
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (const double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  for (double k = std::ceil(lo / step - 1e-9); k * step <= hi + step * 1e-9; k += 1.0) ticks.push_back(k * step);
  return ticks;
}

std::string render(std::span<const Panel> panels, int panel_width, int panel_height) {
  const int n = std::max<int>(1, static_cast<int>(panels.size()));
  const int width = panel_width * n;
  const double ml = 78, mr = 20, mt = 36, mb = 56;
  fmt::memory_buffer out;
  auto emit = std::back_inserter(out);
  fmt::format_to(emit,
                 "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
                 "font-family=\"sans-serif\" font-size=\"12\">\n",
                 width, panel_height, width, panel_height);
  fmt::format_to(emit, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", width, panel_height);

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const Panel& panel = panels[p];
    std::vector<double> xs, ys;
    for (const auto& s : panel.series) {
      xs.insert(xs.end(), s.x.begin(), s.x.end());
      ys.insert(ys.end(), s.y.begin(), s.y.end());
    }
    const Range xr = panel.x_range.value_or(padded_range(xs));
    const Range yr = panel.y_range.value_or(padded_range(ys));
    const double x0 = p * panel_width + ml;
    const double x1 = (p + 1) * panel_width - mr;
    const double y0 = panel_height - mb;  // bottom
    const double y1 = mt;
    auto sx = [&](double v) { return x0 + (v - xr.lo) / (xr.hi - xr.lo) * (x1 - x0); };
    auto sy = [&](double v) { return y0 - (v - yr.lo) / (yr.hi - yr.lo) * (y0 - y1); };

    fmt::format_to(emit, "<g class=\"panel\">\n");
    fmt::format_to(emit,
                   "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                   "stroke=\"black\"/>\n",
                   x0, y1, x1 - x0, y0 - y1);

    const auto xt = nice_ticks(xr.lo, xr.hi);
    const double xstep = xt.size() > 1 ? xt[1] - xt[0] : (xr.hi - xr.lo);
    for (const double t : xt) {
      fmt::format_to(emit, "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n",
                     sx(t), y0, y0 + 5);
      fmt::format_to(emit, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", sx(t), y0 + 19,
                     tick_label(t, xstep));
    }
    const auto yt = nice_ticks(yr.lo, yr.hi);
    const double ystep = yt.size() > 1 ? yt[1] - yt[0] : (yr.hi - yr.lo);
    for (const double t : yt) {
      fmt::format_to(emit, "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n",
                     x0 - 5, sy(t), x0);
      fmt::format_to(emit, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", x0 - 8, sy(t) + 4,
                     tick_label(t, ystep));
    }
    fmt::format_to(emit, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", (x0 + x1) / 2,
                   panel_height - 14.0, escape(panel.x_label));
    const double ly = (y0 + y1) / 2;
    const double lx = p * panel_width + 18.0;
    fmt::format_to(emit,
                   "<text x=\"{0:.2f}\" y=\"{1:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 {0:.2f} "
                   "{1:.2f})\">{2}</text>\n",
                   lx, ly, escape(panel.y_label));
    if (!panel.title.empty()) {
      fmt::format_to(emit, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     (x0 + x1) / 2, mt - 12, escape(panel.title));
    }

    fmt::format_to(emit, "<clipPath id=\"clip{}\"><rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\"/>"
                         "</clipPath>\n",
                   p, x0, y1, x1 - x0, y0 - y1);
    int legend_row = 0;
    for (std::size_t s = 0; s < panel.series.size(); ++s) {
      const Series& series = panel.series[s];
      const std::string color = series.color.empty() ? palette[s % std::size(palette)] : series.color;
      const std::size_t m = std::min(series.x.size(), series.y.size());
      bool degenerate = m > 0;
      for (std::size_t k = 1; k < m && degenerate; ++k) {
        degenerate = series.x[k] == series.x[0] && series.y[k] == series.y[0];
      }
      if (degenerate) {
        fmt::format_to(emit, "<circle class=\"point\" cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"3\" fill=\"{}\"/>\n",
                       sx(series.x[0]), sy(series.y[0]), color);
      } else if (m > 1) {
        fmt::format_to(emit, "<polyline clip-path=\"url(#clip{})\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\" points=\"",
                       p, color);
        for (std::size_t k = 0; k < m; ++k) {
          fmt::format_to(emit, "{}{:.3f},{:.3f}", k ? " " : "", sx(series.x[k]), sy(series.y[k]));
        }
        fmt::format_to(emit, "\"/>\n");
      }
      if (series.markers && !degenerate) {
        for (std::size_t k = 0; k < m; ++k) {
          fmt::format_to(emit, "<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"2.5\" fill=\"{}\"/>\n", sx(series.x[k]),
                         sy(series.y[k]), color);
        }
      }
      if (!series.label.empty()) {
        const double ry = y1 + 14 + 16.0 * legend_row++;
        fmt::format_to(emit,
                       "<g class=\"legend\"><line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                       "stroke-width=\"2\"/><text x=\"{:.2f}\" y=\"{:.2f}\">{}</text></g>\n",
                       x1 - 130, ry, x1 - 108, ry, color, x1 - 102, ry + 4, escape(series.label));
      }
    }
    fmt::format_to(emit, "</g>\n");
  }
  fmt::format_to(emit, "</svg>\n");
  return fmt::to_string(out);
}

}  // namespace h2pipe::svg
