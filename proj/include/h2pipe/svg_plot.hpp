// Minimal standalone SVG line plots: axes, ticks, labels, legend.

#ifndef H2PIPE_SVG_PLOT_HPP
#define H2PIPE_SVG_PLOT_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace h2pipe::svg {

struct Range {
  double lo = 0;
  double hi = 1;
};

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;      // empty: not in the legend
  std::string color;      // empty: palette color
  bool markers = false;   // draw a dot at every point
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<Range> x_range;  // default: data extent, padded
  std::optional<Range> y_range;
};

/// Data extent widened by `pad` of its width on each side. A zero-width
/// extent becomes +-max(|v| pad, pad) around the value; no data gives [0, 1].
[[nodiscard]] Range padded_range(std::span<const double> values, double pad = 0.05);

/// Round tick positions (1, 2, 5 x 10^k steps) inside [lo, hi].
[[nodiscard]] std::vector<double> nice_ticks(double lo, double hi, int target = 5);

/// Panels are laid out left to right in one document.
[[nodiscard]] std::string render(std::span<const Panel> panels, int panel_width = 520, int panel_height = 400);

}  // namespace h2pipe::svg

#endif  // H2PIPE_SVG_PLOT_HPP
