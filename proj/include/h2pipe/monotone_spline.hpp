// Shape-preserving piecewise cubic Hermite interpolation (Fritsch-Carlson).

#ifndef H2PIPE_MONOTONE_SPLINE_HPP
#define H2PIPE_MONOTONE_SPLINE_HPP

#include "h2pipe/chebyshev.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace h2pipe {

template <typename Scalar = double>
class MonotoneSpline {
 public:
  MonotoneSpline(Vector<Scalar> x, Vector<Scalar> y) : x_(std::move(x)), y_(std::move(y)) {
    const Eigen::Index n = x_.size();
    if (n < 2 || y_.size() != n) {
      throw std::invalid_argument("MonotoneSpline: need at least 2 knots with matching values");
    }
    for (Eigen::Index i = 1; i < n; ++i) {
      if (!(x_(i) > x_(i - 1))) {
        throw std::invalid_argument("MonotoneSpline: knot abscissae must be strictly increasing");
      }
    }

    Vector<Scalar> secant(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      secant(i) = (y_(i + 1) - y_(i)) / (x_(i + 1) - x_(i));
    }

    slope_.resize(n);
    slope_(0) = secant(0);
    slope_(n - 1) = secant(n - 2);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      if (secant(i - 1) * secant(i) <= Scalar(0)) {
        slope_(i) = 0;  // local extremum or flat segment
      } else {
        slope_(i) = Scalar(0.5) * (secant(i - 1) + secant(i));
      }
    }

    // Keep (alpha, beta) inside the circle of radius 3 on every interval.
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (secant(i) == Scalar(0)) {
        slope_(i) = 0;
        slope_(i + 1) = 0;
        continue;
      }
      const Scalar alpha = slope_(i) / secant(i);
      const Scalar beta = slope_(i + 1) / secant(i);
      if (alpha < Scalar(0)) slope_(i) = 0;
      if (beta < Scalar(0)) slope_(i + 1) = 0;
      const Scalar r2 = alpha * alpha + beta * beta;
      if (r2 > Scalar(9)) {
        const Scalar tau = Scalar(3) / std::sqrt(r2);
        slope_(i) = tau * alpha * secant(i);
        slope_(i + 1) = tau * beta * secant(i);
      }
    }
  }

  /// Evaluates the interpolant; arguments outside the knot range are clamped.
  [[nodiscard]] Scalar operator()(Scalar xq) const {
    const Eigen::Index n = x_.size();
    if (xq <= x_(0)) return y_(0);
    if (xq >= x_(n - 1)) return y_(n - 1);
    const auto* begin = x_.data();
    const auto* it = std::upper_bound(begin, begin + n, xq);
    const Eigen::Index i = static_cast<Eigen::Index>(it - begin) - 1;
    const Scalar h = x_(i + 1) - x_(i);
    const Scalar s = (xq - x_(i)) / h;
    const Scalar s2 = s * s;
    const Scalar s3 = s2 * s;
    return (Scalar(2) * s3 - Scalar(3) * s2 + Scalar(1)) * y_(i) + (s3 - Scalar(2) * s2 + s) * h * slope_(i) +
           (Scalar(-2) * s3 + Scalar(3) * s2) * y_(i + 1) + (s3 - s2) * h * slope_(i + 1);
  }

  [[nodiscard]] const Vector<Scalar>& knots_x() const { return x_; }
  [[nodiscard]] const Vector<Scalar>& knots_y() const { return y_; }
  [[nodiscard]] const Vector<Scalar>& slopes() const { return slope_; }

 private:
  Vector<Scalar> x_;
  Vector<Scalar> y_;
  Vector<Scalar> slope_;
};

template <typename Scalar>
[[nodiscard]] MonotoneSpline<Scalar> monotone_spline(const Vector<Scalar>& x, const Vector<Scalar>& y) {
  return MonotoneSpline<Scalar>(x, y);
}

}  // namespace h2pipe

#endif  // H2PIPE_MONOTONE_SPLINE_HPP
