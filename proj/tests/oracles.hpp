#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "steadyks/profile.hpp"

// Test-only oracles, independent of the library's solver and quadrature
// paths: closed-form m = 2 profiles, bisection, adaptive Simpson and a
// quadratic-formula 2x2 eigensolver.

namespace oracles {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;

// sin(x)/x and derivatives.  The series branches reach to |x| = 0.5 because
// the closed forms lose digits to cancellation there, and the tests divide
// these values by Richardson steps.
inline double sinc(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 0.5)
    return 1.0 + x2 * (-1.0 / 6 + x2 * (1.0 / 120 + x2 * (-1.0 / 5040 +
                       x2 * (1.0 / 362880 - x2 / 39916800))));
  return std::sin(x) / x;
}
inline double dsinc(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 0.5)
    return x * (-1.0 / 3 + x2 * (1.0 / 30 + x2 * (-1.0 / 840 +
                x2 * (1.0 / 45360 - x2 / 3991680))));
  return (x * std::cos(x) - std::sin(x)) / (x * x);
}

// 3 (sin x - x cos x)/x^3 and derivative (the N = 5 radial closed form).
inline double kernel5(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 0.5)
    return 1.0 + x2 * (-1.0 / 10 + x2 * (1.0 / 280 + x2 * (-1.0 / 15120 +
                       x2 / 1330560)));
  return 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
}
inline double dkernel5(double x) {
  const double x2 = x * x;
  if (std::abs(x) < 0.5)
    return x * (-1.0 / 5 + x2 * (1.0 / 70 + x2 * (-1.0 / 2520 + x2 / 166320)));
  return 3.0 * (x * x * std::sin(x) - 3.0 * std::sin(x) + 3.0 * x * std::cos(x)) /
         (x * x * x * x);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-14) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// First positive root of tan x = x, located on sin x - x cos x.
inline double tan_equals_x_root() {
  return bisect([](double x) { return std::sin(x) - x * std::cos(x); },
                3.2, 6.2);
}

/// First positive zero of the Bessel function J1.
inline double j1_first_zero() {
  return bisect([](double x) { return std::cyl_bessel_j(1.0, x); }, 3.0, 4.5);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a,
                                   double b, double fa, double fm, double fb,
                                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double tol = 1e-12) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

/// Eigenvalues of a real 2x2 matrix with real spectrum, larger first.
inline std::array<double, 2> eig2x2(const std::array<std::array<double, 2>, 2>& J) {
  const double tr = J[0][0] + J[1][1];
  const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  const double disc = std::sqrt(tr * tr - 4.0 * det);
  return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

/// Closed-form profile for m = 2 in dimension 3 or 5, packaged exactly like
/// solver output (uniform grid + evaluator).  The second derivative of the
/// evaluator comes from Richardson differentiation of the analytic slope,
/// independent of the equation itself.
inline steadyks::RadialProfile closed_form_profile(int N, double alpha,
                                                   int grid_points = 2048) {
  const double k = kInvSqrt2;
  std::function<double(double)> shape, dshape;
  double r_star;
  if (N == 3) {
    shape = [](double x) { return sinc(x); };
    dshape = [](double x) { return dsinc(x); };
    r_star = std::numbers::pi / k;
  } else if (N == 5) {
    shape = [](double x) { return kernel5(x); };
    dshape = [](double x) { return dkernel5(x); };
    r_star = tan_equals_x_root() / k;
  } else {
    throw std::invalid_argument("closed_form_profile: N must be 3 or 5");
  }
  auto psi = [shape, alpha, k](double r) {
    return r >= 0 ? alpha * shape(k * r) : alpha;
  };
  auto dpsi = [dshape, alpha, k](double r) { return alpha * k * dshape(k * r); };
  auto ddpsi = [dpsi](double r) {
    const double e = 1e-5 * (1.0 + r);
    return (dpsi(r + e) - dpsi(r - e)) / (2.0 * e);
  };

  steadyks::RadialProfile p{steadyks::ProfileParams(N, 2.0, alpha), {}, {}, {},
                            r_star, 1e-12, nullptr};
  p.curve = std::make_shared<steadyks::FunctionCurve>(psi, dpsi, ddpsi);
  p.r.resize(grid_points);
  p.psi.resize(grid_points);
  p.dpsi.resize(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    const double r = r_star * i / (grid_points - 1);
    p.r[i] = r;
    p.psi[i] = psi(r);
    p.dpsi[i] = dpsi(r);
  }
  p.psi[0] = alpha;
  p.dpsi[0] = 0.0;
  p.psi[grid_points - 1] = 0.0;
  return p;
}

}  // namespace oracles
