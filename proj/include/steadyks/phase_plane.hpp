#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "steadyks/common.hpp"
#include "steadyks/dense_rk.hpp"
#include "steadyks/lane_emden.hpp"
#include "steadyks/profile.hpp"

// The (u, v) transformation of the profile and the autonomous system it
// satisfies in logarithmic time s = log r:
//   u' = u (N - u - v/(m-1)),   v' = v (-(N-2) + u + v).
// The solution of interest leaves the saddle P3 = (N, 0) along its unstable
// eigenvector and escapes with v divergent, which is what forces the
// support to be finite.

namespace steadyks {

struct PhaseState {
  double s = 0.0;      // log r
  double u_hat = 0.0;
  double v_hat = 0.0;
};

struct FixedPoint {
  std::array<double, 2> point{};
  std::array<double, 2> eigenvalues{};
  std::array<std::array<double, 2>, 2> eigenvectors{};  // column per eigenvalue
};

struct FixedPointReport {
  FixedPoint p1, p2, p3;
};

/// Barrier line z_eps(u) = (m-1)(1+eps)(N-u) lying below the trajectory.
struct BarrierParams {
  int N = 3;
  double m = 2.0;
  double epsilon = 0.0;
  double z(double u_hat) const { return (m - 1.0) * (1.0 + epsilon) * (N - u_hat); }
};

/// Right-hand side of the autonomous system.
inline std::array<double, 2> vector_field(const PhaseState& state, int N, double m) {
  const double u = state.u_hat, v = state.v_hat;
  return {u * (N - u - v / (m - 1.0)), v * (-(N - 2) + u + v)};
}

inline std::array<std::array<double, 2>, 2> phase_jacobian(double u, double v,
                                                           int N, double m) {
  return {{{N - 2.0 * u - v / (m - 1.0), -u / (m - 1.0)},
           {v, -(N - 2.0) + u + 2.0 * v}}};
}

/// The three stationary points of the first quadrant with their analytic
/// eigenstructure.
inline FixedPointReport fixed_points(int N, double m) {
  require_diffusion_dominated(N, m);
  FixedPointReport rep;
  rep.p1.point = {0.0, 0.0};
  rep.p1.eigenvalues = {static_cast<double>(N), -(N - 2.0)};
  rep.p1.eigenvectors = {{{1.0, 0.0}, {0.0, 1.0}}};

  const double lam2 = N - (N - 2.0) / (m - 1.0);
  rep.p2.point = {0.0, N - 2.0};
  rep.p2.eigenvalues = {lam2, N - 2.0};
  rep.p2.eigenvectors = {{{lam2 - (N - 2.0), N - 2.0}, {0.0, 1.0}}};

  rep.p3.point = {static_cast<double>(N), 0.0};
  rep.p3.eigenvalues = {static_cast<double>(-N), 2.0};
  rep.p3.eigenvectors = {{{1.0, 0.0}, {-N / (m - 1.0), N + 2.0}}};
  return rep;
}

/// eps = (2-m)/m below m = 2 and 2/N from there on; both choices make the
/// barrier line a lower fence for the trajectory.
inline BarrierParams barrier_epsilon(int N, double m) {
  require_diffusion_dominated(N, m);
  BarrierParams b;
  b.N = N;
  b.m = m;
  b.epsilon = (m < 2.0) ? (2.0 - m) / m : 2.0 / N;
  return b;
}

/// Transforms a profile into phase states at its grid radii, skipping the
/// startup and support endpoints where the transform is 0/0.
inline std::vector<PhaseState> to_phase(const RadialProfile& profile) {
  const double m = profile.params.m;
  const double p = profile.params.density_power();
  double r_lo = 2.0 * auto_startup_radius(profile.params);
  if (auto dense = std::dynamic_pointer_cast<const DenseRkCurve>(profile.curve))
    r_lo = 2.0 * dense->startup_radius();
  const double r_hi = profile.r_star * (1.0 - 1e-6);

  std::vector<PhaseState> states;
  states.reserve(profile.r.size());
  for (std::size_t i = 0; i < profile.r.size(); ++i) {
    const double r = profile.r[i];
    if (r < r_lo || r > r_hi) continue;
    const double psi = profile.psi[i];
    const double dpsi = profile.dpsi[i];
    if (!(psi > 0.0) || !(dpsi < 0.0))
      throw InvalidParamsError(
          "to_phase: grid point with psi <= 0 or psi' >= 0 at r = " +
          std::to_string(r));
    PhaseState st;
    st.s = std::log(r);
    st.u_hat = -(m - 1.0) / m * r * pow_clamped(psi, p) / dpsi;
    st.v_hat = -r * dpsi / psi;
    states.push_back(st);
  }
  return states;
}

/// One named check of the trajectory invariants; margin > 0 means satisfied
/// with room to spare.
struct PhaseCheck {
  bool passed = false;
  double margin = 0.0;
  std::string detail;
};

struct PhaseInvariantReport {
  PhaseCheck u_below_N;       // u < N everywhere
  PhaseCheck u_decreasing;    // u strictly decreasing in s
  PhaseCheck barrier;         // v >= z_eps(u) - slack
  bool divergence_observed = false;  // max v exceeded N - 2
  double max_v = 0.0;
  std::string divergence_note;

  bool all_passed() const {
    return u_below_N.passed && u_decreasing.passed && barrier.passed;
  }
};

inline PhaseInvariantReport check_invariants(const std::vector<PhaseState>& states,
                                             int N, double m,
                                             double barrier_slack = 1e-6) {
  PhaseInvariantReport rep;
  if (states.empty()) {
    rep.u_below_N.detail = rep.u_decreasing.detail = rep.barrier.detail =
        "no states to check";
    rep.divergence_note = "no states to check";
    return rep;
  }
  const BarrierParams barrier = barrier_epsilon(N, m);

  double min_gap_N = std::numeric_limits<double>::infinity();
  double min_step = std::numeric_limits<double>::infinity();
  double min_barrier = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < states.size(); ++i) {
    min_gap_N = std::min(min_gap_N, N - states[i].u_hat);
    if (i > 0) min_step = std::min(min_step, states[i - 1].u_hat - states[i].u_hat);
    min_barrier = std::min(min_barrier, states[i].v_hat - barrier.z(states[i].u_hat));
    rep.max_v = std::max(rep.max_v, states[i].v_hat);
  }
  rep.u_below_N = {min_gap_N > 0.0, min_gap_N,
                   min_gap_N > 0.0 ? "u stays below N" : "u reached N"};
  rep.u_decreasing = {min_step > 0.0, min_step,
                      min_step > 0.0 ? "u strictly decreasing" : "u not decreasing"};
  rep.barrier = {min_barrier >= -barrier_slack, min_barrier,
                 min_barrier >= -barrier_slack ? "trajectory above the barrier line"
                                               : "trajectory crossed the barrier line"};
  rep.divergence_observed = rep.max_v > N - 2.0;
  rep.divergence_note = rep.divergence_observed
                            ? "v exceeded N - 2"
                            : "divergence not yet observed (states may be truncated)";
  return rep;
}

/// Independent construction of the trajectory: integrates the autonomous
/// system from a point displaced 1e-6 from P3 along the unstable
/// eigenvector, until v exceeds `v_stop`.
inline std::vector<PhaseState> integrate_unstable_manifold(int N, double m,
                                                           double v_stop = 0.0,
                                                           double rtol = 1e-12) {
  require_diffusion_dominated(N, m);
  if (v_stop <= 0.0) v_stop = 10.0 * (N + 2.0);
  const std::array<double, 2> w{-N / (m - 1.0), N + 2.0};
  const double norm = std::hypot(w[0], w[1]);

  auto rhs = [N, m](double, const State2& y, State2& dy) {
    dy[0] = y[0] * (N - y[0] - y[1] / (m - 1.0));
    dy[1] = y[1] * (-(N - 2.0) + y[0] + y[1]);
  };
  StepControl ctrl;
  ctrl.rtol = rtol;
  ctrl.atol = 1e-14;
  Dopri5<decltype(rhs)> integrator(rhs, ctrl);
  integrator.start(0.0, {N + 1e-6 * w[0] / norm, 1e-6 * w[1] / norm}, 1e-3);

  std::vector<PhaseState> states;
  states.push_back({0.0, integrator.state()[0], integrator.state()[1]});
  while (integrator.state()[1] < v_stop && states.size() < 100000) {
    integrator.step();
    states.push_back({integrator.time(), integrator.state()[0], integrator.state()[1]});
  }
  return states;
}

}  // namespace steadyks
