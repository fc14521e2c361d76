// Chebyshev-extrema collocation grid and first-derivative matrix on [0, L].

#ifndef H2PIPE_CHEBYSHEV_HPP
#define H2PIPE_CHEBYSHEV_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace h2pipe {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Nodes x_i = (L/2)(1 - cos(i*pi/M)), i = 0..M, and the dense matrix that maps
/// nodal values to nodal derivatives of the degree-M interpolant.
/// Row index is the evaluation node. Immutable once built.
template <typename Scalar = double>
struct GridOperators {
  int order = 0;          // M
  Scalar length_m = 0;    // L
  Vector<Scalar> nodes_m; // M + 1 entries
  Matrix<Scalar> diff;    // (M + 1) x (M + 1), units 1/m

  [[nodiscard]] Eigen::Index size() const { return nodes_m.size(); }
};

template <typename Scalar = double>
[[nodiscard]] GridOperators<Scalar> build_grid(int order, Scalar length_m) {
  if (order < 1) {
    throw std::invalid_argument("build_grid: order must be >= 1, got " +
                                std::to_string(order));
  }
  if (!(length_m > Scalar(0)) || !std::isfinite(static_cast<double>(length_m))) {
    throw std::invalid_argument("build_grid: length must be positive and finite");
  }

  const Eigen::Index n = order + 1;
  GridOperators<Scalar> g;
  g.order = order;
  g.length_m = length_m;
  g.nodes_m.resize(n);

  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar half = length_m / Scalar(2);
  for (Eigen::Index i = 0; i < n; ++i) {
    g.nodes_m(i) = half * (Scalar(1) - std::cos(Scalar(i) * pi / Scalar(order)));
  }
  // cos(pi) is exactly -1 but the product may still round; pin both ends.
  g.nodes_m(0) = Scalar(0);
  g.nodes_m(n - 1) = length_m;

  const auto& x = g.nodes_m;
  g.diff.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        Scalar sum = 0;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k != j) sum += Scalar(1) / (x(j) - x(k));
        }
        g.diff(i, j) = sum;
      } else {
        Scalar prod = 1;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k != i && k != j) prod *= (x(i) - x(k)) / (x(j) - x(k));
        }
        g.diff(i, j) = prod / (x(j) - x(i));
      }
    }
  }
  return g;
}

template <typename Scalar, typename Derived>
[[nodiscard]] Vector<Scalar> apply_derivative(const GridOperators<Scalar>& g,
                                              const Eigen::MatrixBase<Derived>& values) {
  if (values.size() != g.size()) {
    throw std::invalid_argument("apply_derivative: expected " + std::to_string(g.size()) +
                                " values, got " + std::to_string(values.size()));
  }
  return g.diff * values;
}

}  // namespace h2pipe

#endif  // H2PIPE_CHEBYSHEV_HPP
