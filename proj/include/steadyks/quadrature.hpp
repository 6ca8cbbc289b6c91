#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

// One-dimensional quadrature helpers.  Uniform grids get a fourth-order
// cumulative rule (corrected trapezoid from the local cubic); arbitrary
// grids fall back to the plain trapezoid rule.

namespace steadyks {

inline bool is_uniform_grid(std::span<const double> x, double rel_tol = 1e-9) {
  if (x.size() < 3) return true;
  const double h = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs((x[i] - x[i - 1]) - h) > rel_tol * std::abs(h)) return false;
  }
  return true;
}

/// Cumulative trapezoid: out[i] = integral of f from x[0] to x[i].
inline std::vector<double> cumtrapz(std::span<const double> x,
                                    std::span<const double> f) {
  if (x.size() != f.size()) throw std::invalid_argument("cumtrapz: size mismatch");
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
  return out;
}

/// Fourth-order cumulative integral on a uniform grid.  Interior panels use
/// the (-1, 13, 13, -1)/24 rule, boundary panels the one-sided cubic rule.
/// Falls back to cumtrapz when the grid is too short or non-uniform.
inline std::vector<double> cumquad(std::span<const double> x,
                                   std::span<const double> f) {
  const std::size_t n = x.size();
  if (n != f.size()) throw std::invalid_argument("cumquad: size mismatch");
  if (n < 4 || !is_uniform_grid(x)) return cumtrapz(x, f);
  const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
  std::vector<double> out(n, 0.0);
  out[1] = out[0] + h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  for (std::size_t i = 1; i + 2 < n; ++i)
    out[i + 1] =
        out[i] + h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
  out[n - 1] = out[n - 2] + h / 24.0 *
                                (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] +
                                 9.0 * f[n - 1]);
  return out;
}

/// Definite integral over the whole grid (fourth order on uniform grids).
inline double integrate(std::span<const double> x, std::span<const double> f) {
  const std::size_t n = x.size();
  if (n != f.size()) throw std::invalid_argument("integrate: size mismatch");
  if (n < 2) return 0.0;
  if (n < 4 || !is_uniform_grid(x)) {
    double acc = 0.0;
    for (std::size_t i = 1; i < n; ++i)
      acc += 0.5 * (x[i] - x[i - 1]) * (f[i] + f[i - 1]);
    return acc;
  }
  const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
  double acc = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  for (std::size_t i = 1; i + 2 < n; ++i)
    acc += h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
  acc += h / 24.0 *
         (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
  return acc;
}

}  // namespace steadyks
