#pragma once

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include "steadyks/common.hpp"
#include "steadyks/dense_rk.hpp"
#include "steadyks/profile.hpp"

// Construction of the radial profile: series startup near the singular
// origin, adaptive integration with dense output, and zero-crossing
// detection for the support radius.

namespace steadyks {

struct SolveOptions {
  double rtol = 1e-10;
  double atol_scale = 1e-14;      // absolute tolerance = atol_scale * alpha
  int grid_points = 2048;         // uniform resampling of the output
  double root_tol = 1e-12;        // |psi(R*)| < root_tol * alpha
  double max_step_fraction = 0.01;  // cap on h relative to the radius scale
  double safety_radius_factor = 50.0;
};

/// Radius scale of the support predicted by the startup parabola,
/// sqrt(2Nm/(m-1)) alpha^{-mu}; used for step caps and runaway detection.
inline double support_radius_scale(const ProfileParams& p) {
  return std::sqrt(2.0 * p.N * p.m / (p.m - 1.0)) *
         std::pow(p.alpha, -p.mu());
}

/// Coefficient of the r^4 term of the startup series.
inline double startup_quartic(const ProfileParams& p) {
  const double c = p.startup_curvature();
  return p.N * p.density_power() * c * c / (8.0 * p.alpha * (p.N + 2));
}

/// Startup radius keeping the neglected quartic term below 1e-14 alpha
/// while staying well inside the support.
inline double auto_startup_radius(const ProfileParams& p) {
  const double r_mu = 0.01 * std::pow(p.alpha, -p.mu());
  const double r_quartic = std::pow(1e-14 * p.alpha / startup_quartic(p), 0.25);
  return std::min(r_mu, r_quartic);
}

/// Second-order expansion at the origin: psi = alpha - c r^2/2,
/// psi' = -c r with c = (m-1) alpha^{1/(m-1)} / (N m).
inline std::pair<double, double> series_startup(const ProfileParams& params,
                                                double r0) {
  if (!(r0 > 0.0))
    throw InvalidParamsError("series_startup: requires r0 > 0");
  const double c = params.startup_curvature();
  const double psi0 = params.alpha - 0.5 * c * r0 * r0;
  if (!(psi0 > 0.5 * params.alpha))
    throw InvalidParamsError(
        "series_startup: r0 too large, startup series leaves psi > alpha/2");
  return {psi0, -c * r0};
}

/// Integrates the profile equation from the series startup until psi
/// crosses zero, locating the support radius on the dense output.
inline RadialProfile solve_profile(const ProfileParams& params,
                                   const SolveOptions& opts = {}) {
  const int N = params.N;
  const double m = params.m;
  const double p = params.density_power();
  const double alpha = params.alpha;

  const double r0 = auto_startup_radius(params);
  const auto [psi0, dpsi0] = series_startup(params, r0);

  auto rhs = [N, m, p](double r, const State2& y, State2& dy) {
    dy[0] = y[1];
    dy[1] = -(N - 1) / r * y[1] - (m - 1.0) / m * pow_clamped(y[0], p);
  };

  const double r_scale = support_radius_scale(params);
  StepControl ctrl;
  ctrl.rtol = opts.rtol;
  ctrl.atol = opts.atol_scale * alpha;
  ctrl.max_step = opts.max_step_fraction * r_scale;

  Dopri5<decltype(rhs)> integrator(rhs, ctrl);
  integrator.start(r0, {psi0, dpsi0}, std::min(0.5 * r0, ctrl.max_step));

  std::vector<DenseSegment> segments;
  const double r_max = opts.safety_radius_factor * r_scale;
  while (integrator.state()[0] > 0.0) {
    if (integrator.time() > r_max)
      throw SolverError(
          "solve_profile: psi has not crossed zero within the safety radius; "
          "the support is guaranteed finite, so the integrator is "
          "misconfigured");
    segments.push_back(integrator.step());
  }

  // Bisect the dense output of the crossing step.
  const DenseSegment& last = segments.back();
  double lo = last.t0, hi = last.t0 + last.h;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double val = last.value(0, mid);
    if (std::abs(val) < opts.root_tol * alpha && val >= 0.0) {
      lo = hi = mid;
      break;
    }
    (val > 0.0 ? lo : hi) = mid;
    if (hi - lo < 4e-16 * hi) break;
  }
  const double r_star = 0.5 * (lo + hi);
  const double dpsi_star = last.value(1, r_star);
  if (!(dpsi_star < 0.0))
    throw SolverError("solve_profile: non-transversal crossing at r_star");

  RadialProfile out{params, {}, {}, {}, r_star, 0.0, nullptr};
  out.r_star_error =
      std::max(opts.root_tol * alpha / -dpsi_star, 10.0 * opts.rtol * r_star);
  auto curve = std::make_shared<DenseRkCurve>(alpha, params.startup_curvature(),
                                              startup_quartic(params), r0,
                                              std::move(segments), r_star);
  out.curve = curve;

  const int n = std::max(opts.grid_points, 16);
  out.r.resize(n);
  out.psi.resize(n);
  out.dpsi.resize(n);
  for (int i = 0; i < n; ++i) {
    const double r = r_star * i / (n - 1);
    out.r[i] = r;
    out.psi[i] = curve->psi(r);
    out.dpsi[i] = curve->dpsi(r);
  }
  out.r[0] = 0.0;
  out.psi[0] = alpha;
  out.dpsi[0] = 0.0;
  out.r[n - 1] = r_star;
  out.psi[n - 1] = 0.0;
  out.dpsi[n - 1] = dpsi_star;
  return out;
}

/// A posteriori consistency check: maximum of
/// |psi'' + (N-1)/r psi' + (m-1)/m psi^{1/(m-1)}| over grid midpoints,
/// differentiating the profile's own evaluator.
inline double ode_residual(const RadialProfile& profile) {
  const int N = profile.params.N;
  const double m = profile.params.m;
  const double p = profile.params.density_power();
  double startup = 0.0;
  if (auto dense = std::dynamic_pointer_cast<const DenseRkCurve>(profile.curve))
    startup = dense->startup_radius();
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < profile.r.size(); ++i) {
    const double mid = 0.5 * (profile.r[i] + profile.r[i + 1]);
    if (mid <= startup || mid >= profile.r_star) continue;
    const double res = profile.ddpsi_at(mid) +
                       (N - 1) / mid * profile.dpsi_at(mid) +
                       (m - 1.0) / m * pow_clamped(profile.psi_at(mid), p);
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

}  // namespace steadyks
