#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "steadyks/common.hpp"
#include "steadyks/quadrature.hpp"

// Fixed-point construction of the profile derivative on a startup interval
// [0, delta]: W maps to
//   F(W)(r) = -((m-1)/(m r^{N-1})) * integral_0^r s^{N-1} (alpha + integral_0^s W)^{1/(m-1)} ds,
// iterated from W = 0 until the L^1 residual is below tolerance.  This is
// an oracle for the Runge-Kutta construction, independent of it.

namespace steadyks {

struct PicardSolution {
  double delta = 0.0;
  std::vector<double> r;
  std::vector<double> w;  // candidate psi', nonpositive
  int iterations = 0;
  double residual = 0.0;  // L^1 fixed-point residual on [0, delta]
};

struct PicardOptions {
  int grid_points = 4097;
  double tol = 1e-13;  // L^1 residual target, scaled by alpha * delta
};

/// Contraction-regime bound delta_1 for a given epsilon (the X_{eps,delta}
/// ball radius); the default epsilon = alpha.
inline double picard_delta1(const ProfileParams& p, double eps) {
  const double q = pow_clamped(p.alpha + eps, p.density_power());
  const double a = p.N * p.m * p.alpha / ((p.m - 1.0) * q);
  const double b = std::sqrt(2.0 * eps * p.N * p.m / ((p.m - 1.0) * q));
  return std::min({1.0, a, b});
}

/// Default startup interval: stays inside the contraction regime and well
/// inside the support.
inline double picard_default_delta(const ProfileParams& p) {
  return std::min(picard_delta1(p, p.alpha),
                  0.1 * std::pow(p.alpha, -p.mu()));
}

inline PicardSolution picard_oracle(const ProfileParams& params, double delta,
                                    int max_iter = 200,
                                    const PicardOptions& opts = {}) {
  if (!(delta > 0.0))
    throw InvalidParamsError("picard_oracle: requires delta > 0");
  const int n = std::max(opts.grid_points, 9);
  const double p = params.density_power();
  const double m = params.m;
  const int N = params.N;

  PicardSolution sol;
  sol.delta = delta;
  sol.r.resize(n);
  for (int i = 0; i < n; ++i) sol.r[i] = delta * i / (n - 1);
  sol.w.assign(n, 0.0);

  std::vector<double> integrand(n), w_next(n);
  const double tol = opts.tol * params.alpha * delta;
  for (int iter = 1; iter <= max_iter; ++iter) {
    // psi(s) = alpha + integral_0^s W
    std::vector<double> psi = cumquad(sol.r, sol.w);
    for (int i = 0; i < n; ++i) {
      psi[i] += params.alpha;
      integrand[i] = std::pow(sol.r[i], N - 1) * pow_clamped(psi[i], p);
    }
    const std::vector<double> inner = cumquad(sol.r, integrand);
    w_next[0] = 0.0;
    for (int i = 1; i < n; ++i)
      w_next[i] = -(m - 1.0) / (m * std::pow(sol.r[i], N - 1)) * inner[i];

    std::vector<double> diff(n);
    for (int i = 0; i < n; ++i) diff[i] = std::abs(w_next[i] - sol.w[i]);
    sol.residual = integrate(sol.r, diff);
    sol.w.swap(w_next);
    sol.iterations = iter;
    if (sol.residual < tol) {
      for (double wv : sol.w)
        if (wv > 0.0)
          throw SolverError("picard_oracle: positive W in the fixed point");
      return sol;
    }
  }
  throw ConvergenceError(
      "picard_oracle: no contraction after " + std::to_string(max_iter) +
      " iterations; delta is likely outside the contraction regime");
}

}  // namespace steadyks
