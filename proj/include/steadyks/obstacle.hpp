#pragma once

#include <cmath>
#include <vector>

#include "steadyks/common.hpp"
#include "steadyks/free_energy.hpp"
#include "steadyks/profile.hpp"
#include "steadyks/quadrature.hpp"

// Verification of the obstacle-problem characterization of minimizers:
//   m/(m-1) U^{m-1} = (V + C)_+  with  C = (1/M) integral (m/(m-1) U^{m-1} - V) U,
// which for a radial profile means  m/(m-1) psi = V + C  inside the support
// and V + C <= 0 outside, together with the boundary flatness of
// psi^{1 + delta/(m-1)} at the support radius.

namespace steadyks {

struct ChatConstant {
  double average = 0.0;   // mass-average formula from the variational identity
  double boundary = 0.0;  // -V(r_star), forced by psi(r_star) = 0
};

/// Both routes to the obstacle constant; they agree on exact solutions.
inline ChatConstant chat_constant(const RadialProfile& profile,
                                  const RadialPotential& potential) {
  const int N = profile.params.N;
  const double m = profile.params.m;
  const double p = profile.params.density_power();

  // the sphere area cancels between the F U integral and the mass
  const std::size_t n = profile.r.size();
  std::vector<double> f_num(n), f_mass(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::pow(profile.r[i], N - 1);
    const double u = pow_clamped(profile.psi[i], p);
    f_num[i] = (m / (m - 1.0) * profile.psi[i] - potential.values[i]) * u * w;
    f_mass[i] = u * w;
  }
  ChatConstant out;
  out.average = integrate(profile.r, f_num) / integrate(profile.r, f_mass);
  out.boundary = -potential.values.back();
  return out;
}

inline ChatConstant chat_constant(const RadialProfile& profile) {
  return chat_constant(profile, newtonian_potential(density_from_profile(profile)));
}

struct ObstacleTolerances {
  double inside_rel = 1e-7;        // relative to m/(m-1) alpha
  double outside_slack = 1e-10;
  double consistency_rel = 1e-8;
  double boundary_exclusion = 1e-4;  // fraction of r_star excluded inside
  int outside_samples = 512;
};

struct ObstacleReport {
  double c_hat = 0.0;
  double inside_residual = 0.0;      // sup over the support of |m/(m-1) psi - V - C|
  double inside_residual_rel = 0.0;  // the same, relative to m/(m-1) alpha
  double outside_margin = 0.0;       // inf over (r_star, 3 r_star] of -(V + C)
  double c_hat_consistency = 0.0;    // |C_average - (-V(r_star))|
  bool inside_ok = false;
  bool outside_ok = false;
  bool consistency_ok = false;
  bool passed = false;
};

/// Checks the obstacle identity on a solved (or deserialized) profile.
/// Returns a structured report; never throws on a violation.
inline ObstacleReport verify_obstacle(const RadialProfile& profile,
                                      const RadialPotential& potential,
                                      const ObstacleTolerances& tol = {}) {
  const double m = profile.params.m;
  const double alpha = profile.params.alpha;
  const double scale = m / (m - 1.0) * alpha;

  const ChatConstant chat = chat_constant(profile, potential);
  ObstacleReport rep;
  rep.c_hat = chat.average;
  rep.c_hat_consistency = std::abs(chat.average - chat.boundary);

  const double r_cut = profile.r_star * (1.0 - tol.boundary_exclusion);
  double worst = 0.0;
  for (std::size_t i = 0; i < profile.r.size(); ++i) {
    if (profile.r[i] > r_cut) break;
    const double res =
        m / (m - 1.0) * profile.psi[i] - potential.values[i] - rep.c_hat;
    worst = std::max(worst, std::abs(res));
  }
  rep.inside_residual = worst;
  rep.inside_residual_rel = worst / scale;

  double margin = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= tol.outside_samples; ++j) {
    const double r =
        profile.r_star * (1.0 + 2.0 * j / static_cast<double>(tol.outside_samples));
    margin = std::min(margin, -(potential.at(r) + rep.c_hat));
  }
  rep.outside_margin = margin;

  rep.inside_ok = rep.inside_residual_rel <= tol.inside_rel;
  rep.outside_ok = rep.outside_margin >= -tol.outside_slack;
  rep.consistency_ok = rep.c_hat_consistency <= tol.consistency_rel * std::abs(rep.c_hat);
  rep.passed = rep.inside_ok && rep.outside_ok && rep.consistency_ok;
  return rep;
}

inline ObstacleReport verify_obstacle(const RadialProfile& profile,
                                      const ObstacleTolerances& tol = {}) {
  return verify_obstacle(profile, newtonian_potential(density_from_profile(profile)),
                         tol);
}

struct BoundaryFlatness {
  double delta = 0.0;
  std::vector<double> h;             // boundary-layer widths, decreasing
  std::vector<double> max_gradient;  // sup of |d/dr psi^{1+delta/(m-1)}| per layer
  bool decreasing = false;
};

/// Gradient of psi^{1 + delta/(m-1)} near the support boundary: the
/// quantity (1 + delta/(m-1)) psi^{delta/(m-1)} |psi'| sampled densely over
/// [r_star (1-h), r_star) for each h.
inline BoundaryFlatness boundary_flatness(const RadialProfile& profile, double delta,
                                          std::vector<double> layers = {1e-2, 1e-3,
                                                                        1e-4},
                                          int samples = 256) {
  if (!(delta >= 0.0))
    throw InvalidParamsError("boundary_flatness: requires delta >= 0");
  const double q = delta / (profile.params.m - 1.0);
  BoundaryFlatness out;
  out.delta = delta;
  out.h = std::move(layers);
  for (double h : out.h) {
    double worst = 0.0;
    for (int j = 0; j < samples; ++j) {
      const double r =
          profile.r_star * (1.0 - h * (1.0 - j / static_cast<double>(samples)));
      const double val = (1.0 + q) * pow_clamped(profile.psi_at(r), q) *
                         std::abs(profile.dpsi_at(r));
      worst = std::max(worst, val);
    }
    out.max_gradient.push_back(worst);
  }
  out.decreasing = true;
  for (std::size_t i = 1; i < out.max_gradient.size(); ++i)
    if (out.max_gradient[i] > out.max_gradient[i - 1]) out.decreasing = false;
  return out;
}

}  // namespace steadyks
