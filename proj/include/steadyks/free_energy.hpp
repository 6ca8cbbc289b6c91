#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "steadyks/common.hpp"
#include "steadyks/profile.hpp"
#include "steadyks/quadrature.hpp"

// Free energy of radial compactly supported densities,
//   E[rho] = 1/(m-1) integral rho^m - 1/2 integral rho V,
// with the Newtonian potential V reduced to one-dimensional cumulative
// integrals, plus the interpolated Hardy-Littlewood-Sobolev pairing bound
// and the mass-only lower bound it implies.

namespace steadyks {

/// Nonnegative radial density on [0, r_outer], zero beyond.
struct RadialDensity {
  int N = 3;
  std::vector<double> r;
  std::vector<double> rho;
  double r_outer = 0.0;
  double mass = 0.0;
};

inline RadialDensity make_radial_density(int N, std::vector<double> r,
                                         std::vector<double> rho) {
  if (N < 3) throw InvalidParamsError("radial density: requires N >= 3");
  if (r.size() != rho.size() || r.size() < 2)
    throw InvalidParamsError("radial density: bad grid");
  if (r.front() != 0.0)
    throw InvalidParamsError("radial density: grid must start at 0");
  for (double v : rho)
    if (v < 0.0) throw InvalidParamsError("radial density: negative value");
  RadialDensity d;
  d.N = N;
  d.r = std::move(r);
  d.rho = std::move(rho);
  d.r_outer = d.r.back();
  std::vector<double> f(d.r.size());
  for (std::size_t i = 0; i < d.r.size(); ++i)
    f[i] = d.rho[i] * std::pow(d.r[i], N - 1);
  d.mass = sphere_surface_area(N) * integrate(d.r, f);
  return d;
}

/// rho = psi^{1/(m-1)} sampled on the profile grid.
inline RadialDensity density_from_profile(const RadialProfile& profile) {
  const double p = profile.params.density_power();
  std::vector<double> rho(profile.psi.size());
  for (std::size_t i = 0; i < rho.size(); ++i)
    rho[i] = pow_clamped(profile.psi[i], p);
  return make_radial_density(profile.params.N, profile.r, rho);
}

/// Newtonian potential of a radial density,
///   V(r) = 1/(N-2) [ r^{2-N} integral_0^r rho s^{N-1} ds + integral_r^R rho s ds ],
/// evaluated by cumulative quadrature on the density grid.
struct RadialPotential {
  int N = 3;
  std::vector<double> r;
  std::vector<double> values;
  double mass_moment = 0.0;  // integral_0^R rho s^{N-1} ds

  /// Potential at an arbitrary radius; exact multipole tail beyond the
  /// support, linear interpolation between grid nodes inside.
  double at(double rr) const {
    if (rr >= r.back())
      return mass_moment / ((N - 2) * std::pow(rr, N - 2));
    auto it = std::upper_bound(r.begin(), r.end(), rr);
    const std::size_t i = (it == r.begin()) ? 0 : (it - r.begin()) - 1;
    const std::size_t j = std::min(i, r.size() - 2);
    const double t = (rr - r[j]) / (r[j + 1] - r[j]);
    return (1.0 - t) * values[j] + t * values[j + 1];
  }
};

namespace detail {
/// integral_a^b s^k (linear interpolant of rho) ds, exact.
inline double linear_moment(double a, double b, double rho_a, double rho_b, int k) {
  const double slope = (rho_b - rho_a) / (b - a);
  const double intercept = rho_a - slope * a;
  return intercept / (k + 1) * (std::pow(b, k + 1) - std::pow(a, k + 1)) +
         slope / (k + 2) * (std::pow(b, k + 2) - std::pow(a, k + 2));
}
}  // namespace detail

inline RadialPotential newtonian_potential(const RadialDensity& density) {
  const int N = density.N;
  const std::size_t n = density.r.size();
  std::vector<double> f_in(n), f_out(n);
  for (std::size_t i = 0; i < n; ++i) {
    f_in[i] = density.rho[i] * std::pow(density.r[i], N - 1);
    f_out[i] = density.rho[i] * density.r[i];
  }
  std::vector<double> inner = cumquad(density.r, f_in);
  const std::vector<double> outer_cum = cumquad(density.r, f_out);

  // The startup panels of the fourth-order rule are exact only to cubics,
  // and the r^{2-N} factor amplifies their error on rho s^{N-1} near the
  // origin.  Replace them with exact piecewise-linear moments.
  const std::size_t k0 = std::min<std::size_t>(8, n - 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < k0; ++i) {
    acc += detail::linear_moment(density.r[i], density.r[i + 1], density.rho[i],
                                 density.rho[i + 1], N - 1);
    const double shift = acc - inner[i + 1];
    inner[i + 1] = acc;
    if (i + 1 == k0)
      for (std::size_t j = k0 + 1; j < n; ++j) inner[j] += shift;
  }

  RadialPotential pot;
  pot.N = N;
  pot.r = density.r;
  pot.mass_moment = inner.back();
  pot.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = density.r[i];
    const double outer = outer_cum.back() - outer_cum[i];
    const double bulk = (r > 0.0) ? std::pow(r, 2 - N) * inner[i] : 0.0;
    pot.values[i] = (bulk + outer) / (N - 2);
  }
  return pot;
}

struct EnergyReport {
  double entropy = 0.0;      // 1/(m-1) integral rho^m
  double interaction = 0.0;  // 1/2 integral rho V
  double total = 0.0;
  double lower_bound = 0.0;  // mass-only bound, total >= lower_bound
};

struct HLSConfig {
  double C_HLS = 0.0;
  double theta = 0.0;  // (N-2) m / (2N (m-1))
};

/// Sharp constant of the HLS inequality for the |x|^{-(N-2)} kernel at the
/// diagonal exponent 2N/(N+2).
inline double sharp_hls_constant(int N) {
  const double log_c = 0.5 * (N - 2) * std::log(std::numbers::pi) -
                       std::lgamma(0.5 * (N + 2)) -
                       2.0 / N * (std::lgamma(0.5 * N) - std::lgamma(N));
  return std::exp(log_c);
}

inline HLSConfig hls_config(int N, double m) {
  require_diffusion_dominated(N, m);
  HLSConfig cfg;
  cfg.C_HLS = sharp_hls_constant(N);
  cfg.theta = (N - 2) * m / (2.0 * N * (m - 1.0));
  return cfg;
}

/// Crossing point of the pointwise comparison functions and the resulting
/// mass-only lower bound on the free energy.
struct LowerBoundBreakdown {
  double R0 = 0.0;
  double bound = 0.0;
};

inline LowerBoundBreakdown energy_lower_bound(double M, int N, double m,
                                              const HLSConfig& cfg) {
  if (!(M > 0.0)) throw InvalidParamsError("energy_lower_bound: requires M > 0");
  const double sigma = sphere_surface_area(N);
  LowerBoundBreakdown out;
  out.R0 = std::pow((m - 1.0) * cfg.C_HLS * std::pow(M, 2.0 / N) /
                        (2.0 * (N - 2) * sigma),
                    1.0 / (m - 2.0 + 2.0 / N));
  out.bound = -cfg.C_HLS * std::pow(M, 1.0 + 2.0 / N) *
              std::pow(out.R0, 1.0 - 2.0 / N) / ((N - 2) * sigma);
  return out;
}

/// Free energy of a density.  The interaction term always goes through the
/// radial potential; the double integral is never formed.
inline EnergyReport energy(const RadialDensity& density, double m,
                           const HLSConfig& cfg) {
  const int N = density.N;
  const double sigma = sphere_surface_area(N);
  const RadialPotential pot = newtonian_potential(density);

  const std::size_t n = density.r.size();
  std::vector<double> f_ent(n), f_int(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::pow(density.r[i], N - 1);
    f_ent[i] = pow_clamped(density.rho[i], m) * w;
    f_int[i] = density.rho[i] * pot.values[i] * w;
  }
  EnergyReport rep;
  rep.entropy = sigma / (m - 1.0) * integrate(density.r, f_ent);
  rep.interaction = 0.5 * sigma * integrate(density.r, f_int);
  rep.total = rep.entropy - rep.interaction;
  rep.lower_bound =
      density.mass > 0.0 ? energy_lower_bound(density.mass, N, m, cfg).bound : 0.0;
  return rep;
}

inline EnergyReport energy(const RadialDensity& density, double m) {
  return energy(density, m, hls_config(density.N, m));
}

struct PairingBound {
  double pairing = 0.0;  // integral rho V
  double bound = 0.0;    // C/((N-2) sigma_N) ||rho||_1^{2/N} ||rho||_{2-2/N}^{2-2/N}
};

/// Computed pairing against its interpolated HLS bound; the pairing cannot
/// exceed the bound when cfg.C_HLS is at least the sharp constant.  The
/// bound uses the L^1 and L^{2-2/N} norms only, so the diffusion exponent
/// enters through cfg alone.
inline PairingBound hls_pairing_bound(const RadialDensity& density,
                                      const HLSConfig& cfg, double /*m*/) {
  const int N = density.N;
  const double sigma = sphere_surface_area(N);
  const RadialPotential pot = newtonian_potential(density);
  const std::size_t n = density.r.size();
  std::vector<double> f_pair(n), f_q(n);
  const double q = 2.0 - 2.0 / N;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::pow(density.r[i], N - 1);
    f_pair[i] = density.rho[i] * pot.values[i] * w;
    f_q[i] = pow_clamped(density.rho[i], q) * w;
  }
  PairingBound out;
  out.pairing = sigma * integrate(density.r, f_pair);
  const double norm_q_q = sigma * integrate(density.r, f_q);
  out.bound = cfg.C_HLS / ((N - 2) * sigma) *
              std::pow(density.mass, 2.0 / N) * norm_q_q;
  return out;
}

}  // namespace steadyks
