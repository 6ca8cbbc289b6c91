#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

// Shared domain constants, parameter validation and the clamped power
// routine used by every module that evaluates fractional powers of a
// density or profile.

namespace steadyks {

class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid problem parameters (dimension, exponent, central value, ...).
class InvalidParamsError : public Error {
  using Error::Error;
};

/// The critical exponent m = 2 - 2/N, where the mass map degenerates and
/// every stationary state carries the same mass.
class CriticalCaseError : public InvalidParamsError {
  using InvalidParamsError::InvalidParamsError;
};

/// Numerical failure inside an integrator or root finder.
class SolverError : public Error {
  using Error::Error;
};

/// An iteration failed to reach its tolerance within the allowed budget.
class ConvergenceError : public Error {
  using Error::Error;
};

/// Critical diffusion exponent for dimension N.
inline double critical_exponent(int dim) { return 2.0 - 2.0 / dim; }

/// Scaling exponent mu = (2 - m) / (2 (m - 1)).  Requires m > 1.
inline double mu_exponent(double m) {
  if (!(m > 1.0))
    throw InvalidParamsError("mu_exponent: requires m > 1, got m = " +
                             std::to_string(m));
  return 0.5 * (2.0 - m) / (m - 1.0);
}

/// Surface area of the unit sphere S^{N-1}: 2 pi^{N/2} / Gamma(N/2).
inline double sphere_surface_area(int dim) {
  return 2.0 * std::exp(0.5 * dim * std::log(std::numbers::pi) -
                        std::lgamma(0.5 * dim));
}

/// Volume of the N-dimensional ball of radius r.
inline double ball_volume(int dim, double radius) {
  return sphere_surface_area(dim) / dim * std::pow(radius, dim);
}

/// x^p with x clamped below at 1e-300, returning 0 for x <= 0.  Keeps the
/// right-hand side of the profile equation continuous as the profile
/// crosses zero, and is shared by every density-power evaluation.
inline double pow_clamped(double x, double p) {
  if (x <= 0.0) return 0.0;
  return std::exp(p * std::log(x < 1e-300 ? 1e-300 : x));
}

inline bool is_critical_exponent(int dim, double m) {
  return std::abs(m - critical_exponent(dim)) <= 1e-12;
}

/// Validates N >= 3 and m strictly above the critical exponent 2 - 2/N.
/// The critical case gets its own error so callers can surface it.
inline void require_diffusion_dominated(int dim, double m) {
  if (dim < 3)
    throw InvalidParamsError("requires dimension N >= 3, got N = " +
                             std::to_string(dim));
  if (is_critical_exponent(dim, m))
    throw CriticalCaseError(
        "critical case m = 2 - 2/N = " + std::to_string(critical_exponent(dim)) +
        ": the mass map degenerates (every stationary state has the same "
        "mass), so no profile is selected by the mass");
  if (!(m > critical_exponent(dim)))
    throw InvalidParamsError("requires m > 2 - 2/N = " +
                             std::to_string(critical_exponent(dim)) +
                             ", got m = " + std::to_string(m));
}

/// Problem instance: dimension N, diffusion exponent m and central value
/// psi(0) = alpha.
struct ProfileParams {
  int N = 3;
  double m = 2.0;
  double alpha = 1.0;

  ProfileParams() = default;
  ProfileParams(int N_, double m_, double alpha_) : N(N_), m(m_), alpha(alpha_) {
    require_diffusion_dominated(N, m);
    if (!(alpha > 0.0))
      throw InvalidParamsError("requires alpha > 0, got alpha = " +
                               std::to_string(alpha));
  }

  /// Exponent 1/(m-1) turning the profile into the density.
  double density_power() const { return 1.0 / (m - 1.0); }

  /// Scaling exponent mu of the alpha-rescaling family.
  double mu() const { return mu_exponent(m); }

  /// Curvature of the profile at the origin: psi ~ alpha - c r^2 / 2.
  double startup_curvature() const {
    return (m - 1.0) * pow_clamped(alpha, density_power()) / (N * m);
  }
};

}  // namespace steadyks
