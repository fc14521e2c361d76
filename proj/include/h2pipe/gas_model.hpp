// Two-gas isothermal pipe flow, semi-discretized on a Chebyshev grid.
//
// State is the pair of density vectors at nodes 1..M. Node-0 densities are
// u(t) * s(t) (compressed inlet source), the node-M flux is the withdrawal q.
// The algebraic momentum balance is solved for the flux in closed form at
// nodes 0..M-1, which leaves a pure ODE in 2M densities.

#ifndef H2PIPE_GAS_MODEL_HPP
#define H2PIPE_GAS_MODEL_HPP

#include "h2pipe/chebyshev.hpp"
#include "h2pipe/errors.hpp"
#include "h2pipe/units.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace h2pipe {

template <typename Scalar = double>
struct PipeConfig {
  Scalar length_m = 50.0e3;
  Scalar diameter_m = 0.5;
  Scalar friction = 0.011;
  Scalar sigma1_mps = 338.0;
  Scalar sigma2_mps = 4.0 * 338.0;
  Scalar source_pressure_pa = 4.0e6;
  Scalar withdrawal_flux = 75.0;  // kg m^-2 s^-1

  void validate() const {
    auto positive = [](Scalar v, const char* name) {
      if (!(v > Scalar(0)) || !std::isfinite(static_cast<double>(v))) {
        throw std::invalid_argument(std::string("PipeConfig: ") + name + " must be positive");
      }
    };
    positive(length_m, "length_m");
    positive(diameter_m, "diameter_m");
    positive(friction, "friction");
    positive(sigma1_mps, "sigma1_mps");
    positive(sigma2_mps, "sigma2_mps");
    positive(source_pressure_pa, "source_pressure_pa");
    positive(withdrawal_flux, "withdrawal_flux");
    if (!(sigma2_mps > sigma1_mps)) {
      throw std::invalid_argument("PipeConfig: sigma2_mps must exceed sigma1_mps");
    }
  }
};

/// Inlet hydrogen fraction gamma(t) = gamma_bar (1 + kappa sin(2 pi omega t)).
template <typename Scalar = double>
struct ForcingParams {
  Scalar omega_cyc_per_hr = 0.0;
  Scalar kappa = 0.0;
  Scalar gamma_bar = 0.2;

  void validate() const {
    if (!(omega_cyc_per_hr >= Scalar(0))) {
      throw std::invalid_argument("ForcingParams: omega must be >= 0");
    }
    if (!(kappa >= Scalar(0) && kappa <= Scalar(1))) {
      throw std::invalid_argument("ForcingParams: kappa must lie in [0, 1]");
    }
    if (!(gamma_bar > Scalar(0) && gamma_bar < Scalar(1))) {
      throw std::invalid_argument("ForcingParams: gamma_bar must lie in (0, 1)");
    }
    if (gamma_bar * (Scalar(1) + kappa) > Scalar(1)) {
      throw std::invalid_argument("ForcingParams: gamma_bar * (1 + kappa) exceeds 1");
    }
  }
};

/// u(t) = mu_bar - mu (phi(t, 0) - phi(0, 0)).
template <typename Scalar = double>
struct ControlParams {
  Scalar mu_bar = 1.75;
  Scalar mu = 0.0;  // m^2 s kg^-1

  void validate() const {
    if (!(mu_bar >= Scalar(1))) throw std::invalid_argument("ControlParams: mu_bar must be >= 1");
    if (!(mu >= Scalar(0))) throw std::invalid_argument("ControlParams: mu must be >= 0");
  }
};

template <typename Scalar = double>
struct SimState {
  Scalar t_s = 0;
  Vector<Scalar> rho1;  // nodes 0..M
  Vector<Scalar> rho2;
};

template <typename Scalar = double>
struct FluxProfile {
  Vector<Scalar> phi;  // nodes 0..M, phi(M) == withdrawal flux
  Scalar u = 1;
};

template <typename Scalar = double>
struct InletDensities {
  Scalar s1;
  Scalar s2;
};

template <typename Scalar>
[[nodiscard]] Scalar forcing_gamma(Scalar t_s, const ForcingParams<Scalar>& f) {
  const Scalar t_hr = units::s_to_hr(t_s);
  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar gamma = f.gamma_bar * (Scalar(1) + f.kappa * std::sin(two_pi * f.omega_cyc_per_hr * t_hr));
  // kappa = 1 reaches gamma = 0 (pure natural gas) at the trough.
  if (!(gamma >= Scalar(0) && gamma < Scalar(1))) {
    throw InvalidForcing("hydrogen fraction " + std::to_string(static_cast<double>(gamma)) +
                         " outside [0, 1) at t = " + std::to_string(static_cast<double>(t_s)) +
                         " s");
  }
  return gamma;
}

/// s1 = (1 - gamma) p / sigma1^2, s2 = gamma p / sigma2^2, so that
/// sigma1^2 s1 + sigma2^2 s2 = p.
template <typename Scalar>
[[nodiscard]] InletDensities<Scalar> inlet_partial_densities(Scalar gamma,
                                                             const PipeConfig<Scalar>& cfg) {
  const Scalar p = cfg.source_pressure_pa;
  return {(Scalar(1) - gamma) * p / (cfg.sigma1_mps * cfg.sigma1_mps),
          gamma * p / (cfg.sigma2_mps * cfg.sigma2_mps)};
}

template <typename Scalar, typename D1, typename D2>
[[nodiscard]] Vector<Scalar> pressure(const Eigen::MatrixBase<D1>& rho1,
                                      const Eigen::MatrixBase<D2>& rho2,
                                      const PipeConfig<Scalar>& cfg) {
  const Scalar a1 = cfg.sigma1_mps * cfg.sigma1_mps;
  const Scalar a2 = cfg.sigma2_mps * cfg.sigma2_mps;
  return a1 * rho1 + a2 * rho2;
}

namespace detail {

// phi = -sign(g) sqrt((2 d / lambda) rho |g|), the root of g = -(lambda / 2d) phi|phi| / rho.
template <typename Scalar>
Scalar closure_flux(Scalar grad_p, Scalar rho_total, const PipeConfig<Scalar>& cfg) {
  const Scalar k = Scalar(2) * cfg.diameter_m / cfg.friction;
  const Scalar mag = std::sqrt(k * rho_total * std::abs(grad_p));
  return grad_p > Scalar(0) ? -mag : mag;
}

}  // namespace detail

/// Fluxes at nodes 0..M-1 from the momentum balance, phi(M) = q.
template <typename Scalar>
[[nodiscard]] FluxProfile<Scalar> flux_closure(const SimState<Scalar>& state, Scalar u,
                                               const GridOperators<Scalar>& g,
                                               const PipeConfig<Scalar>& cfg) {
  const Eigen::Index n = g.size();
  const Vector<Scalar> grad = g.diff * pressure(state.rho1, state.rho2, cfg);
  if (!grad.allFinite()) throw NumericalFailure("flux_closure: non-finite pressure gradient");

  FluxProfile<Scalar> out;
  out.u = u;
  out.phi.resize(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    out.phi(i) = detail::closure_flux(grad(i), state.rho1(i) + state.rho2(i), cfg);
  }
  out.phi(n - 1) = cfg.withdrawal_flux;
  return out;
}

template <typename Scalar = double>
struct ControlSolution {
  Scalar u;
  Scalar phi0;
};

namespace detail {

// Inlet flux as a function of the compression ratio u. The node-0 pressure is
// u * p_src and the row-0 gradient is affine in u.
template <typename Scalar>
struct InletFluxMap {
  Scalar d00;        // diff(0, 0)
  Scalar rest;       // sum_{j >= 1} diff(0, j) p_j
  Scalar p_src;      // sigma1^2 s1 + sigma2^2 s2
  Scalar rho_src;    // s1 + s2
  Scalar k;          // 2 d / lambda

  [[nodiscard]] Scalar grad(Scalar u) const { return d00 * u * p_src + rest; }

  [[nodiscard]] Scalar phi0(Scalar u) const {
    const Scalar gr = grad(u);
    const Scalar mag = std::sqrt(k * u * rho_src * std::abs(gr));
    return gr > Scalar(0) ? -mag : mag;
  }

  // d phi0 / du; infinite at grad == 0, callers fall back to bisection.
  [[nodiscard]] Scalar dphi0(Scalar u) const {
    const Scalar gr = grad(u);
    const Scalar phi = phi0(u);
    if (phi == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
    // phi^2 = k rho_src u |g|  =>  2 phi phi' = k rho_src (|g| + u sign(g) d00 p_src)
    const Scalar sg = gr > Scalar(0) ? Scalar(1) : Scalar(-1);
    return k * rho_src * (std::abs(gr) + u * sg * d00 * p_src) / (Scalar(2) * phi);
  }
};

template <typename Scalar, typename Derived>
InletFluxMap<Scalar> make_inlet_map(const Eigen::MatrixBase<Derived>& y, InletDensities<Scalar> s,
                                    const GridOperators<Scalar>& g, const PipeConfig<Scalar>& cfg) {
  const Eigen::Index m = g.order;
  const Scalar a1 = cfg.sigma1_mps * cfg.sigma1_mps;
  const Scalar a2 = cfg.sigma2_mps * cfg.sigma2_mps;
  Scalar rest = 0;
  for (Eigen::Index j = 1; j <= m; ++j) {
    rest += g.diff(0, j) * (a1 * y(j - 1) + a2 * y(m + j - 1));
  }
  return {g.diff(0, 0), rest, a1 * s.s1 + a2 * s.s2, s.s1 + s.s2,
          Scalar(2) * cfg.diameter_m / cfg.friction};
}

}  // namespace detail

inline constexpr double control_bracket_lo = 1.0e-3;
inline constexpr double control_bracket_hi = 1.0e3;

/// Solves u = mu_bar - mu (phi0(u) - phi_ref) for the compression ratio.
/// `interior` holds rho1 at nodes 1..M followed by rho2 at nodes 1..M.
template <typename Scalar, typename Derived>
[[nodiscard]] ControlSolution<Scalar> control_input(const Eigen::MatrixBase<Derived>& interior,
                                                    Scalar t_s, const ForcingParams<Scalar>& f,
                                                    const ControlParams<Scalar>& c,
                                                    const GridOperators<Scalar>& g,
                                                    const PipeConfig<Scalar>& cfg, Scalar phi_ref,
                                                    Scalar u_guess = Scalar(-1)) {
  if (interior.size() != 2 * g.order) {
    throw std::invalid_argument("control_input: interior state must have 2M entries");
  }
  const auto s = inlet_partial_densities(forcing_gamma(t_s, f), cfg);
  const auto map = detail::make_inlet_map(interior, s, g, cfg);

  if (c.mu == Scalar(0)) return {c.mu_bar, map.phi0(c.mu_bar)};

  auto residual = [&](Scalar u) { return u - c.mu_bar + c.mu * (map.phi0(u) - phi_ref); };
  auto tolerance = [](Scalar u) { return Scalar(1e-12) * std::max(Scalar(1), std::abs(u)); };

  Scalar lo = Scalar(control_bracket_lo);
  Scalar hi = Scalar(control_bracket_hi);
  Scalar f_lo = residual(lo);
  Scalar f_hi = residual(hi);
  if (!std::isfinite(static_cast<double>(f_lo)) || !std::isfinite(static_cast<double>(f_hi)) ||
      (f_lo > Scalar(0)) == (f_hi > Scalar(0))) {
    throw ControllerInfeasible("control_input: no compression ratio in [1e-3, 1e3] satisfies "
                               "the feedback law at t = " +
                                   std::to_string(static_cast<double>(t_s)) + " s, mu = " +
                                   std::to_string(static_cast<double>(c.mu)),
                               static_cast<double>(t_s), static_cast<double>(c.mu));
  }
  if (f_lo == Scalar(0)) return {lo, map.phi0(lo)};
  if (f_hi == Scalar(0)) return {hi, map.phi0(hi)};
  const bool increasing = f_hi > Scalar(0);

  Scalar u = (u_guess > lo && u_guess < hi) ? u_guess : std::clamp(c.mu_bar, lo, hi);
  for (int it = 0; it < 400; ++it) {
    const Scalar r = residual(u);
    if (std::abs(r) <= tolerance(u)) return {u, map.phi0(u)};
    if ((r > Scalar(0)) == increasing) {
      hi = u;
    } else {
      lo = u;
    }
    const Scalar slope = Scalar(1) + c.mu * map.dphi0(u);
    Scalar next = u - r / slope;
    if (!std::isfinite(static_cast<double>(next)) || !(next > lo && next < hi)) {
      next = Scalar(0.5) * (lo + hi);
    }
    if (next == u || hi - lo <= std::numeric_limits<Scalar>::epsilon() * hi) {
      // Bracket exhausted at floating-point resolution.
      return {u, map.phi0(u)};
    }
    u = next;
  }
  throw ControllerInfeasible("control_input: feedback solve did not converge", static_cast<double>(t_s),
                             static_cast<double>(c.mu));
}

/// Outlet and inlet quantities recorded along a trajectory.
template <typename Scalar = double>
struct Observables {
  Scalar rho1_out;
  Scalar rho2_out;
  Scalar p_out;
  Scalar phi_in;
  Scalar u;
};

/// Semi-discrete system in the interior densities, with the feedback loop
/// closed inside every evaluation.
template <typename Scalar = double>
class GasPipeModel {
 public:
  using VectorType = Vector<Scalar>;

  GasPipeModel(GridOperators<Scalar> grid, PipeConfig<Scalar> cfg, ForcingParams<Scalar> forcing,
               ControlParams<Scalar> control, Scalar phi_ref)
      : grid_(std::move(grid)),
        cfg_(cfg),
        forcing_(forcing),
        control_(control),
        phi_ref_(phi_ref),
        u_warm_(control.mu_bar) {}

  [[nodiscard]] const GridOperators<Scalar>& grid() const { return grid_; }
  [[nodiscard]] const PipeConfig<Scalar>& pipe() const { return cfg_; }
  [[nodiscard]] const ForcingParams<Scalar>& forcing() const { return forcing_; }
  [[nodiscard]] const ControlParams<Scalar>& control() const { return control_; }
  [[nodiscard]] Scalar phi_ref() const { return phi_ref_; }
  [[nodiscard]] Eigen::Index dimension() const { return 2 * grid_.order; }

  [[nodiscard]] ControlSolution<Scalar> solve_control(Scalar t_s, const VectorType& y) const {
    return control_input(y, t_s, forcing_, control_, grid_, cfg_, phi_ref_, u_warm_);
  }

  /// Full nodal state with the inlet densities set from the feedback solution.
  [[nodiscard]] SimState<Scalar> full_state(Scalar t_s, const VectorType& y, Scalar u) const {
    const Eigen::Index m = grid_.order;
    const auto s = inlet_partial_densities(forcing_gamma(t_s, forcing_), cfg_);
    SimState<Scalar> st;
    st.t_s = t_s;
    st.rho1.resize(m + 1);
    st.rho2.resize(m + 1);
    st.rho1(0) = u * s.s1;
    st.rho2(0) = u * s.s2;
    st.rho1.tail(m) = y.head(m);
    st.rho2.tail(m) = y.tail(m);
    return st;
  }

  [[nodiscard]] VectorType rhs(Scalar t_s, const VectorType& y) const {
    const Eigen::Index m = grid_.order;
    const Scalar u = solve_control(t_s, y).u;
    const SimState<Scalar> st = full_state(t_s, y, u);
    const FluxProfile<Scalar> fp = flux_closure(st, u, grid_, cfg_);
    const VectorType total = st.rho1 + st.rho2;
    const VectorType w1 = (st.rho1.array() / total.array() * fp.phi.array()).matrix();
    const VectorType w2 = (st.rho2.array() / total.array() * fp.phi.array()).matrix();
    VectorType dy(2 * m);
    dy.head(m) = -(grid_.diff.bottomRows(m) * w1);
    dy.tail(m) = -(grid_.diff.bottomRows(m) * w2);
    if (!dy.allFinite()) throw NumericalFailure("rhs: non-finite time derivative");
    return dy;
  }

  /// Total density must stay positive at every node. Individual partial
  /// densities may dip below zero where the grid under-resolves the
  /// composition wave.
  [[nodiscard]] bool admissible(const VectorType& y) const {
    const Eigen::Index m = grid_.order;
    return ((y.head(m) + y.tail(m)).array() > Scalar(0)).all();
  }

  void accept_step(Scalar t_s, const VectorType& y) { u_warm_ = solve_control(t_s, y).u; }

  [[nodiscard]] Observables<Scalar> observe(Scalar t_s, const VectorType& y) const {
    const Eigen::Index m = grid_.order;
    const auto sol = solve_control(t_s, y);
    const SimState<Scalar> st = full_state(t_s, y, sol.u);
    const FluxProfile<Scalar> fp = flux_closure(st, sol.u, grid_, cfg_);
    const Scalar a1 = cfg_.sigma1_mps * cfg_.sigma1_mps;
    const Scalar a2 = cfg_.sigma2_mps * cfg_.sigma2_mps;
    return {st.rho1(m), st.rho2(m), a1 * st.rho1(m) + a2 * st.rho2(m), fp.phi(0), sol.u};
  }

 private:
  GridOperators<Scalar> grid_;
  PipeConfig<Scalar> cfg_;
  ForcingParams<Scalar> forcing_;
  ControlParams<Scalar> control_;
  Scalar phi_ref_;
  Scalar u_warm_;
};

/// Stacks nodes 1..M of each density vector into the integrator layout.
template <typename Scalar>
[[nodiscard]] Vector<Scalar> interior_of(const SimState<Scalar>& st) {
  const Eigen::Index m = st.rho1.size() - 1;
  Vector<Scalar> y(2 * m);
  y.head(m) = st.rho1.tail(m);
  y.tail(m) = st.rho2.tail(m);
  return y;
}

/// Closed-form outlet-ward pressure for uniform composition and constant flux:
/// p(x)^2 = p_in^2 - lambda c^2 q^2 x / d, with c^2 = p_src / (s1 + s2).
template <typename Scalar>
[[nodiscard]] Scalar steady_pressure_oracle(Scalar x_m, Scalar p_in, Scalar q,
                                            InletDensities<Scalar> s,
                                            const PipeConfig<Scalar>& cfg) {
  const Scalar c2 = cfg.source_pressure_pa / (s.s1 + s.s2);
  const Scalar p2 = p_in * p_in - cfg.friction * c2 * q * q * x_m / cfg.diameter_m;
  if (!(p2 > Scalar(0))) {
    throw ChokedFlow("steady state: squared pressure non-positive at x = " +
                     std::to_string(static_cast<double>(x_m)) + " m");
  }
  return std::sqrt(p2);
}

/// Steady state at t = 0 for withdrawal flux q_init with inlet pressure mu_bar * p_src.
template <typename Scalar>
[[nodiscard]] SimState<Scalar> solve_steady(const ForcingParams<Scalar>& f, const ControlParams<Scalar>& c,
                                            const GridOperators<Scalar>& g,
                                            const PipeConfig<Scalar>& cfg, Scalar q_init) {
  if (!(q_init >= Scalar(0))) throw std::invalid_argument("solve_steady: q_init must be >= 0");
  const Eigen::Index m = g.order;
  const auto s = inlet_partial_densities(forcing_gamma(Scalar(0), f), cfg);
  const Scalar p_in = c.mu_bar * cfg.source_pressure_pa;
  const Scalar c2 = cfg.source_pressure_pa / (s.s1 + s.s2);
  const Scalar drag = cfg.friction / (Scalar(2) * cfg.diameter_m) * q_init * q_init * c2;

  // Unknowns p_1..p_M; momentum rows 0..M-1: (D p)_i + drag / p_i = 0.
  Vector<Scalar> p(m + 1);
  p(0) = p_in;
  for (Eigen::Index i = 1; i <= m; ++i) {
    p(i) = steady_pressure_oracle(g.nodes_m(i), p_in, q_init, s, cfg);
  }

  if (q_init == Scalar(0)) p.setConstant(p_in);
  Matrix<Scalar> jac(m, m);
  Vector<Scalar> res(m);
  auto residual = [&] {
    const Vector<Scalar> dp = g.diff * p;
    for (Eigen::Index i = 0; i < m; ++i) res(i) = dp(i) + drag / p(i);
  };
  bool converged = q_init == Scalar(0);
  for (int it = 0; it < 50 && !converged; ++it) {
    residual();
    jac = g.diff.topRightCorner(m, m);
    for (Eigen::Index i = 1; i < m; ++i) jac(i, i - 1) -= drag / (p(i) * p(i));
    const Vector<Scalar> step = jac.partialPivLu().solve(res);
    p.tail(m) -= step;
    if (!p.allFinite() || (p.tail(m).array() <= Scalar(0)).any()) {
      throw ChokedFlow("solve_steady: pressure became non-positive during Newton iteration");
    }
    converged = step.template lpNorm<Eigen::Infinity>() <= Scalar(1e-13) * p_in;
  }
  if (!converged) throw SteadySolveFailure("solve_steady: Newton did not converge in 50 iterations");

  SimState<Scalar> st;
  st.t_s = 0;
  const Scalar frac1 = s.s1 / (s.s1 + s.s2);
  const Vector<Scalar> rho = p / c2;
  st.rho1 = rho * frac1;
  st.rho2 = rho - st.rho1;
  st.rho1(0) = c.mu_bar * s.s1;
  st.rho2(0) = c.mu_bar * s.s2;
  return st;
}

}  // namespace h2pipe

#endif  // H2PIPE_GAS_MODEL_HPP
