#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <vector>

#include "steadyks/common.hpp"
#include "steadyks/scaling.hpp"

// Direct minimization of the free energy over nonnegative radial densities
// of fixed mass supported in a ball: piecewise-constant cells, exact shell
// potentials (so the discrete energy IS the continuum energy of the cell
// density), projected gradient descent in the volume-weighted metric, and
// a damped Euler-Lagrange fixed-point refinement to tighten the discrete
// obstacle conditions.

namespace steadyks {

/// Piecewise-constant density on n uniform radial cells of B_R.
struct DiscreteDensity {
  int N = 3;
  double R = 1.0;
  int n = 0;
  double M = 0.0;  // target mass
  std::vector<double> rho;
  std::vector<double> vol;  // N-dimensional shell volume per cell

  double edge(int i) const { return R * i / n; }
  double mid(int i) const { return R * (i + 0.5) / n; }
  double mass() const {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += rho[i] * vol[i];
    return acc;
  }
};

inline DiscreteDensity init_uniform(int N, double M, double R, int n) {
  if (N < 3) throw InvalidParamsError("init_uniform: requires N >= 3");
  if (!(R > 0.0) || !(M > 0.0))
    throw InvalidParamsError("init_uniform: requires R > 0 and M > 0");
  if (n < 16) throw InvalidParamsError("init_uniform: requires n >= 16");
  DiscreteDensity d;
  d.N = N;
  d.R = R;
  d.n = n;
  d.M = M;
  const double sigma = sphere_surface_area(N);
  d.vol.resize(n);
  for (int i = 0; i < n; ++i)
    d.vol[i] = sigma / N * (std::pow(d.edge(i + 1), N) - std::pow(d.edge(i), N));
  d.rho.assign(n, M / ball_volume(N, R));
  return d;
}

/// Volume-averaged Newtonian potential per cell, exact for the
/// piecewise-constant density.  This is the gradient of the exact
/// interaction energy with respect to the cell masses.
inline std::vector<double> cell_average_potential(const DiscreteDensity& d) {
  const int N = d.N, n = d.n;
  std::vector<double> a_in(n + 1, 0.0);   // integral_0^{edge} rho s^{N-1}
  std::vector<double> b_out(n + 1, 0.0);  // integral_{edge}^R rho s
  for (int i = 0; i < n; ++i) {
    const double a = d.edge(i), b = d.edge(i + 1);
    a_in[i + 1] = a_in[i] + d.rho[i] * (std::pow(b, N) - std::pow(a, N)) / N;
  }
  for (int i = n - 1; i >= 0; --i) {
    const double a = d.edge(i), b = d.edge(i + 1);
    b_out[i] = b_out[i + 1] + d.rho[i] * (b * b - a * a) / 2.0;
  }
  std::vector<double> vbar(n);
  for (int i = 0; i < n; ++i) {
    const double a = d.edge(i), b = d.edge(i + 1);
    const double shell_n = std::pow(b, N) - std::pow(a, N);
    const double t1 = (a_in[i] - d.rho[i] * std::pow(a, N) / N) * (b * b - a * a) / 2.0;
    const double t2 = (d.rho[i] / N - d.rho[i] / 2.0) *
                      (std::pow(b, N + 2) - std::pow(a, N + 2)) / (N + 2);
    const double t3 = (b_out[i + 1] + d.rho[i] * b * b / 2.0) * shell_n / N;
    vbar[i] = N * (t1 + t2 + t3) / ((N - 2) * shell_n);
  }
  return vbar;
}

struct DiscreteEnergy {
  double value = 0.0;
  std::vector<double> gradient;  // per cell, d value / d rho_i
};

/// value = sum vol_i rho_i^m/(m-1) - 1/2 sum vol_i rho_i Vbar_i,
/// gradient_i = vol_i (m/(m-1) rho_i^{m-1} - Vbar_i).
inline DiscreteEnergy discrete_energy(const DiscreteDensity& d, double m) {
  const std::vector<double> vbar = cell_average_potential(d);
  DiscreteEnergy out;
  out.gradient.resize(d.n);
  for (int i = 0; i < d.n; ++i) {
    out.value += d.vol[i] * (pow_clamped(d.rho[i], m) / (m - 1.0) -
                             0.5 * d.rho[i] * vbar[i]);
    out.gradient[i] =
        d.vol[i] * (m / (m - 1.0) * pow_clamped(d.rho[i], m - 1.0) - vbar[i]);
  }
  return out;
}

/// Euclidean projection in the volume-weighted metric onto
/// { rho >= 0, sum rho_i vol_i = M }: rho_i = max(0, y_i - theta) with the
/// water-filling threshold theta.
inline void project_mass_simplex(DiscreteDensity& d, const std::vector<double>& y) {
  const int n = d.n;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return y[a] > y[b]; });
  double mass_acc = 0.0, vol_acc = 0.0, theta = 0.0;
  for (int k = 0; k < n; ++k) {
    const int i = order[k];
    mass_acc += y[i] * d.vol[i];
    vol_acc += d.vol[i];
    const double cand = (mass_acc - d.M) / vol_acc;
    if (k + 1 == n || cand >= y[order[k + 1]]) {
      theta = cand;
      break;
    }
  }
  for (int i = 0; i < n; ++i) d.rho[i] = std::max(0.0, y[i] - theta);
  // one linear correction pass to pin the mass to the target exactly
  double mass = 0.0, vol_act = 0.0;
  for (int i = 0; i < n; ++i)
    if (d.rho[i] > 0.0) {
      mass += d.rho[i] * d.vol[i];
      vol_act += d.vol[i];
    }
  if (vol_act > 0.0) {
    const double corr = (mass - d.M) / vol_act;
    for (int i = 0; i < n; ++i)
      if (d.rho[i] > 0.0) d.rho[i] = std::max(0.0, d.rho[i] - corr);
  }
}

struct MinimizeOptions {
  int max_iter = 20000;
  double tol = 1e-10;       // relative energy decrease over the patience window
  int patience = 20;
  double kkt_tol = 1e-6;
  bool polish = true;       // Euler-Lagrange fixed-point refinement
  int polish_iter = 400;
  std::vector<double>* energy_trace = nullptr;  // accepted energies, if wanted
};

struct MinimizeResult {
  DiscreteDensity density;
  double energy = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  bool converged = false;
};

namespace detail {

/// Obstacle-condition violation: on active cells F must equal its
/// mass-weighted average C, on vacuum cells F >= C.
inline double kkt_residual(const DiscreteDensity& d, const std::vector<double>& F) {
  const double rho_max = *std::max_element(d.rho.begin(), d.rho.end());
  const double tol = 1e-12 * rho_max;
  double c_num = 0.0, c_den = 0.0;
  for (int i = 0; i < d.n; ++i)
    if (d.rho[i] > tol) {
      c_num += F[i] * d.rho[i] * d.vol[i];
      c_den += d.rho[i] * d.vol[i];
    }
  const double c_hat = c_num / c_den;
  double worst = 0.0;
  for (int i = 0; i < d.n; ++i) {
    if (d.rho[i] > tol)
      worst = std::max(worst, std::abs(F[i] - c_hat));
    else
      worst = std::max(worst, std::max(0.0, c_hat - F[i]));
  }
  return worst;
}

inline std::vector<double> obstacle_map(const DiscreteDensity& d, double m,
                                        const std::vector<double>& vbar) {
  // F = m/(m-1) rho^{m-1} - Vbar per cell
  std::vector<double> F(d.n);
  for (int i = 0; i < d.n; ++i)
    F[i] = m / (m - 1.0) * pow_clamped(d.rho[i], m - 1.0) - vbar[i];
  return F;
}

/// Solves sum vol_i ((m-1)(vbar_i + c)_+ / m)^{1/(m-1)} = M for c.
inline double solve_obstacle_level(const DiscreteDensity& d, double m,
                                   const std::vector<double>& vbar) {
  const double p = 1.0 / (m - 1.0);
  auto mass_of = [&](double c) {
    double acc = 0.0;
    for (int i = 0; i < d.n; ++i) {
      const double lvl = vbar[i] + c;
      if (lvl > 0.0) acc += d.vol[i] * pow_clamped((m - 1.0) * lvl / m, p);
    }
    return acc;
  };
  const double vmax = *std::max_element(vbar.begin(), vbar.end());
  double lo = -vmax, hi = -vmax + 1.0;
  while (mass_of(hi) < d.M) hi = -vmax + 2.0 * (hi + vmax);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass_of(mid) < d.M ? lo : hi) = mid;
    if (hi - lo < 1e-15 * (std::abs(hi) + 1.0)) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Projected gradient descent with backtracking on Y_{M,R}; every accepted
/// step is non-increasing in energy.  When the gradient phase stalls above
/// the KKT tolerance, a damped fixed point of the obstacle equation
/// rho = ((m-1)(Vbar + C)_+/m)^{1/(m-1)} finishes the job, still under the
/// monotone-decrease contract.
inline MinimizeResult minimize(int N, double m, double M, double R, int n,
                               const MinimizeOptions& opts = {}) {
  require_diffusion_dominated(N, m);
  MinimizeResult res;
  res.density = init_uniform(N, M, R, n);
  DiscreteDensity& d = res.density;

  DiscreteEnergy e = discrete_energy(d, m);
  std::vector<double> y(n), F(n);
  double window_start = e.value;
  int since_window = 0;

  enum class Stop { kkt, window, stall, budget };
  Stop stop = Stop::budget;

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    F = detail::obstacle_map(d, m, cell_average_potential(d));
    res.kkt_residual = detail::kkt_residual(d, F);
    if (res.kkt_residual <= opts.kkt_tol) {
      stop = Stop::kkt;
      break;
    }

    // 1/L step from the entropy curvature m rho^{m-2} at the current scale.
    double rho_ref;
    if (m >= 2.0) {
      rho_ref = *std::max_element(d.rho.begin(), d.rho.end());
    } else {
      double num = 0.0;
      for (int i = 0; i < n; ++i) num += d.rho[i] * d.rho[i] * d.vol[i];
      rho_ref = num / M;  // mass-weighted mean density
    }
    rho_ref = std::max(rho_ref, 1e-12 * M / ball_volume(N, R));
    double step = 1.0 / (m * pow_clamped(rho_ref, m - 2.0));

    DiscreteDensity trial = d;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      for (int i = 0; i < n; ++i) y[i] = d.rho[i] - step * F[i];
      project_mass_simplex(trial, y);
      const DiscreteEnergy et = discrete_energy(trial, m);
      if (et.value < e.value) {
        d.rho = trial.rho;
        e = et;
        accepted = true;
        if (opts.energy_trace) opts.energy_trace->push_back(e.value);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      stop = Stop::stall;  // constrained stationary point within rounding
      break;
    }

    if (++since_window >= opts.patience) {
      if (std::abs(window_start - e.value) <
          opts.tol * std::max(1.0, std::abs(e.value))) {
        stop = Stop::window;
        break;
      }
      window_start = e.value;
      since_window = 0;
    }
  }

  if (opts.polish && stop != Stop::kkt) {
    for (int it = 0; it < opts.polish_iter; ++it) {
      const std::vector<double> vbar = cell_average_potential(d);
      F = detail::obstacle_map(d, m, vbar);
      res.kkt_residual = detail::kkt_residual(d, F);
      if (res.kkt_residual <= opts.kkt_tol) break;
      const double c_hat = detail::solve_obstacle_level(d, m, vbar);
      std::vector<double> target(n);
      const double p = 1.0 / (m - 1.0);
      for (int i = 0; i < n; ++i) {
        const double lvl = vbar[i] + c_hat;
        target[i] = lvl > 0.0 ? pow_clamped((m - 1.0) * lvl / m, p) : 0.0;
      }
      double lambda = 1.0;
      bool improved = false;
      DiscreteDensity trial = d;
      for (int back = 0; back < 40; ++back) {
        for (int i = 0; i < n; ++i)
          trial.rho[i] = (1.0 - lambda) * d.rho[i] + lambda * target[i];
        // the blend keeps nonnegativity; re-pin the mass exactly
        const double mass = trial.mass();
        if (mass > 0.0)
          for (int i = 0; i < n; ++i) trial.rho[i] *= d.M / mass;
        const DiscreteEnergy et = discrete_energy(trial, m);
        if (et.value < e.value) {
          d.rho = trial.rho;
          e = et;
          improved = true;
          if (opts.energy_trace) opts.energy_trace->push_back(e.value);
          break;
        }
        lambda *= 0.5;
      }
      ++iter;
      if (!improved) break;
    }
    F = detail::obstacle_map(d, m, cell_average_potential(d));
    res.kkt_residual = detail::kkt_residual(d, F);
  }

  res.converged = res.kkt_residual <= opts.kkt_tol || stop == Stop::window ||
                  stop == Stop::stall;
  res.energy = discrete_energy(d, m).value;
  res.iterations = iter;
  return res;
}

struct MuCurvePoint {
  double R = 0.0;
  double mu = 0.0;
  bool converged = false;
};

struct MuCurve {
  std::vector<MuCurvePoint> points;
  double r_star = 0.0;      // support radius of the mass-M profile
  bool nonincreasing = false;
  bool stabilized = false;  // flat once R exceeds r_star
};

/// Minimizes per radius with a common cell width (that of the largest
/// radius at `n` cells), so the curve reflects the continuum quantity and
/// not a resolution that varies with R.
inline MuCurve mu_curve(int N, double m, double M, std::vector<double> radii,
                        int n, const MinimizeOptions& opts = {}, int jobs = 1,
                        double slack = 1e-8) {
  if (radii.empty()) throw InvalidParamsError("mu_curve: empty radius list");
  if (!std::is_sorted(radii.begin(), radii.end()))
    throw InvalidParamsError("mu_curve: radii must be increasing");
  const double h = radii.back() / n;
  MuCurve out;
  out.points.resize(radii.size());

  auto run_one = [&](std::size_t idx) {
    const double R = radii[idx];
    const int cells = std::max(16, static_cast<int>(std::lround(R / h)));
    const MinimizeResult r = minimize(N, m, M, R, cells, opts);
    out.points[idx] = {R, r.energy, r.converged};
  };
  if (jobs <= 1) {
    for (std::size_t i = 0; i < radii.size(); ++i) run_one(i);
  } else {
    for (std::size_t base = 0; base < radii.size(); base += jobs) {
      std::vector<std::future<void>> batch;
      for (std::size_t i = base; i < std::min(radii.size(), base + jobs); ++i)
        batch.push_back(std::async(std::launch::async, run_one, i));
      for (auto& f : batch) f.get();
    }
  }

  const double alpha = alpha_of_mass(N, m, M);
  out.r_star = std::pow(alpha, -mu_exponent(m)) *
               canonical_profile(N, m)->canonical.r_star;
  out.nonincreasing = true;
  for (std::size_t i = 1; i < out.points.size(); ++i)
    if (out.points[i].mu > out.points[i - 1].mu + slack) out.nonincreasing = false;
  out.stabilized = true;
  double anchor = 0.0;
  bool have_anchor = false;
  for (const auto& pt : out.points) {
    if (pt.R < out.r_star) continue;
    if (!have_anchor) {
      anchor = pt.mu;
      have_anchor = true;
    } else if (std::abs(pt.mu - anchor) > 0.005 * std::abs(anchor)) {
      out.stabilized = false;
    }
  }
  return out;
}

}  // namespace steadyks
