#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "steadyks/common.hpp"
#include "steadyks/lane_emden.hpp"
#include "steadyks/profile.hpp"
#include "steadyks/quadrature.hpp"

// The exact scaling symmetry psi_alpha(r) = alpha Psi(alpha^mu r): one
// canonical solve per (N, m) gives every central value, the support law
// R*(alpha) = alpha^{-mu} R*(1) and the mass power law
// M1(alpha) = alpha^{1/(m-1) - mu N} M1(1).

namespace steadyks {

struct ScalingLaw {
  double mu = 0.0;             // (2-m)/(2(m-1))
  double mass_exponent = 0.0;  // 1/(m-1) - mu N, positive above the critical case
  double sigma_N = 0.0;        // surface area of S^{N-1}

  static ScalingLaw make(int N, double m) {
    require_diffusion_dominated(N, m);
    ScalingLaw law;
    law.mu = mu_exponent(m);
    law.mass_exponent = 1.0 / (m - 1.0) - law.mu * N;
    law.sigma_N = sphere_surface_area(N);
    return law;
  }
};

/// Canonical (alpha = 1) profile together with its mass.
struct MassMap {
  RadialProfile canonical;
  double M1_of_1 = 0.0;
  double quadrature_error = 0.0;  // Richardson estimate at half resolution
  ScalingLaw law;
};

/// Total mass sigma_N * integral of psi^{1/(m-1)} s^{N-1} over the support,
/// by composite quadrature on the profile's uniform grid.
inline double mass_of_profile(const RadialProfile& profile) {
  const double p = profile.params.density_power();
  const int N = profile.params.N;
  std::vector<double> f(profile.r.size());
  for (std::size_t i = 0; i < profile.r.size(); ++i)
    f[i] = pow_clamped(profile.psi[i], p) * std::pow(profile.r[i], N - 1);
  return sphere_surface_area(N) * integrate(profile.r, f);
}

namespace detail {
inline double mass_at_stride(const RadialProfile& profile, std::size_t stride) {
  const double p = profile.params.density_power();
  const int N = profile.params.N;
  std::vector<double> r, f;
  for (std::size_t i = 0; i < profile.r.size(); i += stride) {
    r.push_back(profile.r[i]);
    f.push_back(pow_clamped(profile.psi[i], p) * std::pow(profile.r[i], N - 1));
  }
  if (r.back() != profile.r.back()) {
    r.push_back(profile.r.back());
    f.push_back(0.0);
  }
  return sphere_surface_area(N) * integrate(r, f);
}
}  // namespace detail

/// Solves the alpha = 1 profile and caches it per (N, m, options).
inline std::shared_ptr<const MassMap> canonical_profile(int N, double m,
                                                        const SolveOptions& opts = {}) {
  require_diffusion_dominated(N, m);
  using Key = std::tuple<int, double, double, int>;
  static std::map<Key, std::shared_ptr<const MassMap>> memo;
  static std::mutex memo_mutex;
  const Key key{N, m, opts.rtol, opts.grid_points};
  {
    std::scoped_lock lock(memo_mutex);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
  }
  auto map = std::make_shared<MassMap>();
  map->canonical = solve_profile(ProfileParams(N, m, 1.0), opts);
  map->M1_of_1 = mass_of_profile(map->canonical);
  map->quadrature_error =
      std::abs(map->M1_of_1 - detail::mass_at_stride(map->canonical, 2));
  map->law = ScalingLaw::make(N, m);
  std::scoped_lock lock(memo_mutex);
  return memo.try_emplace(key, std::move(map)).first->second;
}

/// psi_alpha(r) = alpha Psi(alpha^mu r) on the rescaled grid, sharing the
/// canonical evaluator.
inline RadialProfile rescale(const MassMap& map, double alpha) {
  if (!(alpha > 0.0))
    throw InvalidParamsError("rescale: requires alpha > 0");
  const ProfileParams& cp = map.canonical.params;
  const double mu = map.law.mu;
  const double scale = std::pow(alpha, -mu);

  RadialProfile out{ProfileParams(cp.N, cp.m, alpha), {}, {}, {},
                    scale * map.canonical.r_star,
                    scale * map.canonical.r_star_error, nullptr};
  const std::size_t n = map.canonical.r.size();
  out.r.resize(n);
  out.psi.resize(n);
  out.dpsi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.r[i] = scale * map.canonical.r[i];
    out.psi[i] = alpha * map.canonical.psi[i];
    out.dpsi[i] = alpha / scale * map.canonical.dpsi[i];
  }
  auto base = map.canonical.curve;
  const double a1 = alpha, s1 = 1.0 / scale;
  out.curve = std::make_shared<FunctionCurve>(
      [base, a1, s1](double r) { return a1 * base->psi(s1 * r); },
      [base, a1, s1](double r) { return a1 * s1 * base->dpsi(s1 * r); },
      [base, a1, s1](double r) { return a1 * s1 * s1 * base->ddpsi(s1 * r); });
  return out;
}

/// Closed-form inversion of the mass power law:
/// alpha = (M / M1(1))^{1/(1/(m-1) - mu N)}.
inline double alpha_of_mass(int N, double m, double M,
                            const SolveOptions& opts = {}) {
  require_diffusion_dominated(N, m);
  if (!(M > 0.0))
    throw InvalidParamsError("alpha_of_mass: requires M > 0");
  const auto map = canonical_profile(N, m, opts);
  return std::pow(M / map->M1_of_1, 1.0 / map->law.mass_exponent);
}

/// Truncated mass M2(alpha, R): the mass of psi_alpha inside B_R, equal to
/// M1(alpha) once R covers the support.  Strictly increasing in alpha.
inline double mass_within(const MassMap& map, double alpha, double R,
                          int quad_points = 2048) {
  if (!(alpha > 0.0) || !(R > 0.0))
    throw InvalidParamsError("mass_within: requires alpha > 0 and R > 0");
  const int N = map.canonical.params.N;
  const double p = map.canonical.params.density_power();
  const double mu = map.law.mu;
  const double s_end = std::min(R * std::pow(alpha, mu), map.canonical.r_star);
  std::vector<double> s(quad_points), f(quad_points);
  for (int i = 0; i < quad_points; ++i) {
    s[i] = s_end * i / (quad_points - 1);
    f[i] = pow_clamped(map.canonical.curve->psi(s[i]), p) * std::pow(s[i], N - 1);
  }
  return map.law.sigma_N * std::pow(alpha, 1.0 / (map.canonical.params.m - 1.0) - mu * N) *
         integrate(s, f);
}

}  // namespace steadyks
