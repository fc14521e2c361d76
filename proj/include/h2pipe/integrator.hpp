// Adaptive TR-BDF2 integrator for small stiff systems, with cubic Hermite
// dense output onto a caller-supplied sample grid.

#ifndef H2PIPE_INTEGRATOR_HPP
#define H2PIPE_INTEGRATOR_HPP

#include "h2pipe/chebyshev.hpp"
#include "h2pipe/errors.hpp"
#include "h2pipe/gas_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace h2pipe {

struct IntegratorConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  double max_step_s = 900.0;
  double newton_tol = 1e-10;
  int max_newton_iters = 12;
  double min_step_s = 1e-6;
  int snapshot_stride = 0;  // keep every k-th sample as a full state; 0 disables

  void validate() const {
    if (!(rel_tol > 0 && abs_tol > 0 && max_step_s > 0 && newton_tol > 0 && min_step_s > 0) ||
        max_newton_iters <= 0) {
      throw std::invalid_argument("IntegratorConfig: tolerances and limits must be positive");
    }
    if (!(newton_tol < rel_tol)) {
      throw std::invalid_argument("IntegratorConfig: newton_tol must be below rel_tol");
    }
    if (snapshot_stride < 0) throw std::invalid_argument("IntegratorConfig: snapshot_stride < 0");
  }
};

struct IntegrationStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
  std::size_t jacobians = 0;
  std::size_t factorizations = 0;
};

/// Forward-difference Jacobian. Column i uses the increment
/// max(1e-7 |y_i|, 1e-9 scale_i). `f0` is rhs(t, y) when already known.
template <typename Scalar, typename Rhs>
[[nodiscard]] Matrix<Scalar> jacobian_fd(Rhs&& rhs, Scalar t, const Vector<Scalar>& y,
                                         const Vector<Scalar>& scale,
                                         const Vector<Scalar>* f0 = nullptr) {
  const Eigen::Index n = y.size();
  if (scale.size() != n) throw std::invalid_argument("jacobian_fd: scale size mismatch");
  const Vector<Scalar> base = f0 ? *f0 : Vector<Scalar>(rhs(t, y));
  Matrix<Scalar> jac(n, n);
  Vector<Scalar> yp = y;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar inc = std::max(Scalar(1e-7) * std::abs(y(i)), Scalar(1e-9) * std::abs(scale(i)));
    if (!(inc > Scalar(0))) throw NumericalFailure("jacobian_fd: zero increment");
    yp(i) = y(i) + inc;
    const Scalar actual = yp(i) - y(i);
    const Vector<Scalar> fp = rhs(t, yp);
    if (!fp.allFinite()) throw NumericalFailure("jacobian_fd: non-finite rhs at perturbed point");
    jac.col(i) = (fp - base) / actual;
    yp(i) = y(i);
  }
  return jac;
}

namespace detail {

template <typename Scalar>
Scalar weighted_rms(const Vector<Scalar>& v, const Vector<Scalar>& weight) {
  if (v.size() == 0) return 0;
  return std::sqrt((v.array() / weight.array()).square().mean());
}

template <typename Scalar>
Vector<Scalar> hermite(Scalar s, Scalar h, const Vector<Scalar>& y0, const Vector<Scalar>& f0,
                       const Vector<Scalar>& y1, const Vector<Scalar>& f1) {
  const Scalar s2 = s * s;
  const Scalar s3 = s2 * s;
  const Scalar h00 = Scalar(2) * s3 - Scalar(3) * s2 + Scalar(1);
  const Scalar h10 = s3 - Scalar(2) * s2 + s;
  const Scalar h01 = Scalar(-2) * s3 + Scalar(3) * s2;
  const Scalar h11 = s3 - s2;
  return h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
}

}  // namespace detail

/// Advances `sys` from (t0, y0) and calls on_sample(t, y) at each entry of
/// `sample_times` (non-decreasing, >= t0). System requirements:
///   Vector rhs(Scalar t, const Vector& y) const;
/// optional:
///   bool admissible(const Vector& y) const;       // reject steps that leave the domain
///   void accept_step(Scalar t, const Vector& y);   // called after each accepted step
template <typename Scalar, typename System, typename Sink>
IntegrationStats integrate_dense(System& sys, Vector<Scalar> y, Scalar t0,
                                 std::span<const Scalar> sample_times, const IntegratorConfig& cfg,
                                 Sink&& on_sample) {
  cfg.validate();
  IntegrationStats stats;
  if (sample_times.empty()) return stats;
  if (sample_times.front() < t0) throw std::invalid_argument("integrate_dense: sample before t0");
  for (std::size_t k = 1; k < sample_times.size(); ++k) {
    if (sample_times[k] < sample_times[k - 1]) {
      throw std::invalid_argument("integrate_dense: sample times must be non-decreasing");
    }
  }

  const Eigen::Index n = y.size();
  const Scalar t_end = sample_times.back();
  const Scalar sqrt2 = std::sqrt(Scalar(2));
  const Scalar gam = Scalar(2) - sqrt2;
  const Scalar d = gam / Scalar(2);
  const Scalar bdf_z = Scalar(1) / (gam * (Scalar(2) - gam));
  const Scalar bdf_y = (Scalar(1) - gam) * (Scalar(1) - gam) / (gam * (Scalar(2) - gam));
  const Scalar err_const = sqrt2 / Scalar(2) - Scalar(2) / Scalar(3);
  const Scalar rtol = Scalar(cfg.rel_tol);
  const Scalar atol = Scalar(cfg.abs_tol);

  auto eval = [&](Scalar t, const Vector<Scalar>& x) {
    ++stats.rhs_evals;
    return Vector<Scalar>(sys.rhs(t, x));
  };
  auto admissible = [&](const Vector<Scalar>& x) {
    if constexpr (requires { sys.admissible(x); }) {
      return x.allFinite() && sys.admissible(x);
    } else {
      return x.allFinite();
    }
  };

  Scalar t = t0;
  Vector<Scalar> f = eval(t, y);
  if (!f.allFinite()) throw NumericalFailure("integrate_dense: non-finite rhs at initial state");

  std::size_t next_sample = 0;
  while (next_sample < sample_times.size() && sample_times[next_sample] == t0) {
    on_sample(t0, y);
    ++next_sample;
  }
  if (next_sample == sample_times.size()) return stats;

  const Vector<Scalar> jac_scale = y.cwiseAbs().cwiseMax(atol);
  Matrix<Scalar> jac;
  Eigen::PartialPivLU<Matrix<Scalar>> lu;
  bool jac_current = false;  // computed at the present (t, y)
  bool jac_valid = false;
  Scalar lu_h = Scalar(-1);

  Scalar h = std::min<Scalar>(Scalar(cfg.max_step_s), (t_end - t0) / Scalar(100));
  const Scalar min_step = Scalar(cfg.min_step_s);

  Vector<Scalar> z(n), y1(n), fz(n), f1(n), delta(n);

  // Simplified Newton on x - d h f(tx, x) = c. On success fx holds f(x)
  // recovered from the converged relation.
  auto newton = [&](Scalar tx, Vector<Scalar>& x, const Vector<Scalar>& c, Vector<Scalar>& fx,
                    int& iters) -> bool {
    Scalar prev = 0;
    for (iters = 1; iters <= cfg.max_newton_iters; ++iters) {
      Vector<Scalar> fcur;
      try {
        fcur = eval(tx, x);
      } catch (const NumericalFailure&) {
        return false;
      } catch (const ControllerInfeasible&) {
        return false;
      }
      if (!fcur.allFinite()) return false;
      delta = lu.solve(x - d * h * fcur - c);
      x -= delta;
      const Scalar norm =
          detail::weighted_rms<Scalar>(delta, (x.cwiseAbs().array() + atol).matrix());
      if (!std::isfinite(static_cast<double>(norm))) return false;
      bool done = norm <= Scalar(cfg.newton_tol);
      if (!done && iters > 1 && prev > Scalar(0)) {
        const Scalar rate = norm / prev;
        if (rate >= Scalar(0.9)) return false;
        done = rate / (Scalar(1) - rate) * norm <= Scalar(cfg.newton_tol);
      }
      prev = norm;
      if (done) {
        fx = (x - c) / (d * h);
        return true;
      }
    }
    return false;
  };

  while (t < t_end) {
    h = std::min(h, Scalar(cfg.max_step_s));
    bool last = false;
    if (t + h >= t_end || t + Scalar(1.0001) * h >= t_end) {
      h = t_end - t;
      last = true;
    }

    if (!jac_valid) {
      try {
        jac = jacobian_fd(eval, t, y, jac_scale, &f);
      } catch (const NumericalFailure& e) {
        throw IntegrationFailure(std::string("Jacobian evaluation failed: ") + e.what(),
                                 static_cast<double>(t));
      }
      ++stats.jacobians;
      jac_valid = true;
      jac_current = true;
      lu_h = Scalar(-1);
    }
    if (h != lu_h) {
      lu.compute(Matrix<Scalar>::Identity(n, n) - (d * h) * jac);
      ++stats.factorizations;
      lu_h = h;
    }

    auto reject = [&](Scalar factor, const char* why) {
      ++stats.rejected;
      h *= factor;
      if (h < min_step) {
        throw IntegrationFailure(std::string("step size underflow (") + why + ")",
                                 static_cast<double>(t));
      }
    };

    // Trapezoidal stage to t + gam h.
    const Scalar tz = t + gam * h;
    const Vector<Scalar> cz = y + (d * h) * f;
    z = y + (gam * h) * f;
    int it_z = 0;
    bool ok = newton(tz, z, cz, fz, it_z);

    // BDF2 stage to t + h.
    int it_1 = 0;
    const Scalar t1 = last ? t_end : t + h;
    if (ok) {
      const Vector<Scalar> c1 = bdf_z * z - bdf_y * y;
      y1 = y + (z - y) / gam;
      ok = newton(t1, y1, c1, f1, it_1);
    }
    if (!ok) {
      if (!jac_current) {
        jac_valid = false;  // retry with a fresh Jacobian at the same h
      } else {
        reject(Scalar(0.25), "Newton failure");
      }
      continue;
    }
    if (!admissible(z) || !admissible(y1)) {
      reject(Scalar(0.5), "positivity loss");
      continue;
    }

    try {
      f1 = eval(t1, y1);
    } catch (const NumericalFailure&) {
      reject(Scalar(0.5), "non-finite rhs");
      continue;
    } catch (const ControllerInfeasible&) {
      reject(Scalar(0.5), "controller infeasible");
      continue;
    }

    Vector<Scalar> est = (err_const * Scalar(2) * h) *
                         (f / gam - fz / (gam * (Scalar(1) - gam)) + f1 / (Scalar(1) - gam));
    est = lu.solve(est);
    const Vector<Scalar> weight = (atol + rtol * y.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
    const Scalar err = detail::weighted_rms(est, weight);
    if (!std::isfinite(static_cast<double>(err))) {
      reject(Scalar(0.25), "non-finite error estimate");
      continue;
    }

    if (err > Scalar(1)) {
      reject(std::max(Scalar(0.2), Scalar(0.9) * std::pow(err, Scalar(-1) / Scalar(3))),
             "error test");
      if (!jac_current) jac_valid = false;
      continue;
    }

    // Accepted.
    while (next_sample < sample_times.size() && sample_times[next_sample] <= t1) {
      const Scalar ts = sample_times[next_sample];
      if (ts == t1) {
        on_sample(ts, y1);
      } else {
        on_sample(ts, detail::hermite((ts - t) / h, h, y, f, y1, f1));
      }
      ++next_sample;
    }
    ++stats.steps;
    t = t1;
    y = y1;
    f = f1;
    if constexpr (requires { sys.accept_step(t, y); }) sys.accept_step(t, y);
    jac_current = false;
    if (std::max(it_z, it_1) > (cfg.max_newton_iters + 1) / 2) jac_valid = false;

    const Scalar grow = err > Scalar(0)
                            ? std::min(Scalar(5), std::max(Scalar(0.2), Scalar(0.9) * std::pow(err, Scalar(-1) / Scalar(3))))
                            : Scalar(5);
    h *= grow;
  }
  return stats;
}

/// Uniformly sampled outlet/inlet observables, t_n = n T / N for n = 0..N.
template <typename Scalar = double>
struct Trajectory {
  Vector<Scalar> sample_times_s;
  Vector<Scalar> rho1_out;
  Vector<Scalar> rho2_out;
  Vector<Scalar> p_out;
  Vector<Scalar> phi_in;
  Vector<Scalar> u;
  std::vector<SimState<Scalar>> snapshots;
  IntegrationStats stats;

  [[nodiscard]] Eigen::Index size() const { return sample_times_s.size(); }

  void resize(Eigen::Index n) {
    sample_times_s.resize(n);
    rho1_out.resize(n);
    rho2_out.resize(n);
    p_out.resize(n);
    phi_in.resize(n);
    u.resize(n);
  }
};

template <typename Scalar>
[[nodiscard]] Vector<Scalar> uniform_sample_times(Scalar horizon_s, int n_intervals) {
  Vector<Scalar> t(n_intervals + 1);
  for (int k = 0; k <= n_intervals; ++k) t(k) = horizon_s * Scalar(k) / Scalar(n_intervals);
  return t;
}

/// Runs the pipe model over [0, T] and records N + 1 uniform samples.
template <typename Scalar>
[[nodiscard]] Trajectory<Scalar> integrate(GasPipeModel<Scalar>& model, const Vector<Scalar>& y0,
                                           Scalar horizon_s, int n_intervals,
                                           const IntegratorConfig& icfg) {
  if (!(horizon_s > Scalar(0))) throw std::invalid_argument("integrate: horizon must be positive");
  if (n_intervals < 2) throw std::invalid_argument("integrate: need at least 2 sample intervals");
  if (y0.size() != model.dimension()) throw std::invalid_argument("integrate: state size mismatch");
  if (!model.admissible(y0)) throw std::invalid_argument("integrate: initial densities must be positive");

  Trajectory<Scalar> traj;
  traj.resize(n_intervals + 1);
  traj.sample_times_s = uniform_sample_times(horizon_s, n_intervals);
  Eigen::Index k = 0;
  auto sink = [&](Scalar t, const Vector<Scalar>& y) {
    const auto obs = model.observe(t, y);
    traj.rho1_out(k) = obs.rho1_out;
    traj.rho2_out(k) = obs.rho2_out;
    traj.p_out(k) = obs.p_out;
    traj.phi_in(k) = obs.phi_in;
    traj.u(k) = obs.u;
    if (icfg.snapshot_stride > 0 && k % icfg.snapshot_stride == 0) {
      traj.snapshots.push_back(model.full_state(t, y, obs.u));
    }
    ++k;
  };
  const std::span<const Scalar> times(traj.sample_times_s.data(),
                                      static_cast<std::size_t>(traj.sample_times_s.size()));
  traj.stats = integrate_dense(model, y0, Scalar(0), times, icfg, sink);
  return traj;
}

}  // namespace h2pipe

#endif  // H2PIPE_INTEGRATOR_HPP
