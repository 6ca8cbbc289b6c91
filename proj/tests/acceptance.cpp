// Acceptance suite: one pass/fail line per criterion, exit code equal to
// the number of failures.  Each check pins its tolerance in code; the
// oracles (closed forms, brute-force roots, finite differences) are local
// to this binary and independent of the library paths they check.

#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "steadyks/ball_minimizer.hpp"
#include "steadyks/cli.hpp"
#include "steadyks/free_energy.hpp"
#include "steadyks/lane_emden.hpp"
#include "steadyks/obstacle.hpp"
#include "steadyks/phase_plane.hpp"
#include "steadyks/picard.hpp"
#include "steadyks/scaling.hpp"

using namespace steadyks;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
  int id;
  std::string name;
  std::function<std::string()> run;  // empty string = pass, else failure detail
};

std::vector<std::pair<int, double>> admissible_matrix() {
  std::vector<std::pair<int, double>> matrix;
  for (int N : {3, 4, 5})
    for (double m : {1.5, 2.0, 3.0})
      if (m > critical_exponent(N)) matrix.emplace_back(N, m);
  return matrix;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
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

std::string check_support_radii() {
  std::ostringstream fail;
  const double r3 = solve_profile(ProfileParams(3, 2.0, 1.0)).r_star;
  if (std::abs(r3 - kPi * std::sqrt(2.0)) > 1e-6)
    fail << "R*(3,2,1) = " << r3 << " vs pi sqrt2; ";
  const double x = bisect([](double t) { return std::sin(t) - t * std::cos(t); },
                          3.2, 6.2);  // brute-force root of tan x = x
  const double r5 = solve_profile(ProfileParams(5, 2.0, 1.0)).r_star;
  if (std::abs(r5 - std::sqrt(2.0) * x) > 1e-6)
    fail << "R*(5,2,1) = " << r5 << " vs sqrt2 * " << x << "; ";
  return fail.str();
}

std::string check_closed_form_mass() {
  std::ostringstream fail;
  const auto map = canonical_profile(3, 2.0);
  const double exact = 8.0 * std::sqrt(2.0) * kPi * kPi;
  if (std::abs(map->M1_of_1 - exact) > 1e-5 * exact)
    fail << "M1(1) = " << map->M1_of_1 << " vs 8 sqrt2 pi^2; ";
  for (double M : {1.0, 10.0, 1000.0}) {
    const double alpha = alpha_of_mass(3, 2.0, M);
    const double back = mass_of_profile(rescale(*map, alpha));
    if (std::abs(back - M) > 1e-8 * M)
      fail << "round trip M=" << M << " gave " << back << "; ";
  }
  return fail.str();
}

std::string check_scaling_collapse() {
  std::ostringstream fail;
  const auto map = canonical_profile(3, 1.5);
  const double mu = map->law.mu;
  for (double alpha : {0.5, 2.0, 4.0}) {
    const RadialProfile direct = solve_profile(ProfileParams(3, 1.5, alpha));
    double sup = 0.0;
    for (std::size_t i = 0; i < direct.r.size(); ++i)
      sup = std::max(sup, std::abs(direct.psi[i] -
                                   alpha * map->canonical.curve->psi(
                                               std::pow(alpha, mu) * direct.r[i])));
    if (sup > 1e-6 * alpha)
      fail << "collapse sup at alpha=" << alpha << " is " << sup << "; ";
  }
  // mass-law slope from direct solves
  double x[3] = {std::log(0.5), 0.0, std::log(2.0)}, y[3];
  int k = 0;
  for (double alpha : {0.5, 1.0, 2.0})
    y[k++] = std::log(mass_of_profile(solve_profile(ProfileParams(3, 1.5, alpha))));
  const double xb = (x[0] + x[1] + x[2]) / 3, yb = (y[0] + y[1] + y[2]) / 3;
  double sxy = 0, sxx = 0;
  for (int i = 0; i < 3; ++i) {
    sxy += (x[i] - xb) * (y[i] - yb);
    sxx += (x[i] - xb) * (x[i] - xb);
  }
  const double slope = sxy / sxx;
  if (std::abs(slope - map->law.mass_exponent) > 1e-6)
    fail << "mass-law slope " << slope << " vs " << map->law.mass_exponent << "; ";
  return fail.str();
}

std::string check_obstacle_identity() {
  std::ostringstream fail;
  for (auto [N, m] : admissible_matrix()) {
    const ObstacleReport rep = verify_obstacle(solve_profile(ProfileParams(N, m, 1.0)));
    if (rep.inside_residual_rel > 1e-7)
      fail << "inside residual " << rep.inside_residual_rel << " at (" << N << ","
           << m << "); ";
    if (rep.outside_margin < -1e-10)
      fail << "outside margin " << rep.outside_margin << " at (" << N << "," << m
           << "); ";
  }
  const ChatConstant chat = chat_constant(solve_profile(ProfileParams(3, 2.0, 1.0)));
  if (std::abs(chat.average - (-2.0)) > 1e-8)
    fail << "C-hat(3,2,1) = " << chat.average << " vs -2; ";
  return fail.str();
}

std::string check_phase_invariants() {
  std::ostringstream fail;
  for (auto [N, m] : admissible_matrix()) {
    const RadialProfile p = solve_profile(ProfileParams(N, m, 1.0));
    const PhaseInvariantReport rep = check_invariants(to_phase(p), N, m, 1e-6);
    if (!rep.u_below_N.passed) fail << "u < N failed at (" << N << "," << m << "); ";
    if (!rep.u_decreasing.passed)
      fail << "u decrease failed at (" << N << "," << m << "); ";
    if (!rep.barrier.passed) fail << "barrier failed at (" << N << "," << m << "); ";
    if (!rep.divergence_observed)
      fail << "max v <= N-2 at (" << N << "," << m << "); ";

    const FixedPointReport fps = fixed_points(N, m);
    for (const FixedPoint* fp : {&fps.p1, &fps.p2, &fps.p3}) {
      const auto J = phase_jacobian(fp->point[0], fp->point[1], N, m);
      const double tr = J[0][0] + J[1][1];
      const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
      const double disc = std::sqrt(tr * tr - 4 * det);
      const double hi = 0.5 * (tr + disc), lo = 0.5 * (tr - disc);
      const double ehi = std::max(fp->eigenvalues[0], fp->eigenvalues[1]);
      const double elo = std::min(fp->eigenvalues[0], fp->eigenvalues[1]);
      if (std::abs(hi - ehi) > 1e-12 || std::abs(lo - elo) > 1e-12)
        fail << "eigenvalues off at (" << N << "," << m << "); ";
    }
  }
  return fail.str();
}

std::string check_picard_equivalence() {
  std::ostringstream fail;
  for (auto [N, m] : {std::pair{3, 2.0}, {4, 1.8}}) {
    const ProfileParams params(N, m, 1.0);
    const double delta = picard_default_delta(params);
    const PicardSolution sol = picard_oracle(params, delta);
    const RadialProfile p = solve_profile(params);
    double sup = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i)
      sup = std::max(sup, std::abs(sol.w[i] - p.dpsi_at(sol.r[i])));
    if (sup > 1e-8)
      fail << "sup |W - psi'| = " << sup << " at (" << N << "," << m << "); ";
  }
  return fail.str();
}

std::string check_variational_cross() {
  std::ostringstream fail;
  const double M = 8.0 * std::sqrt(2.0) * kPi * kPi;
  const MinimizeResult res = minimize(3, 2.0, M, 6.0, 512);
  const RadialProfile p = solve_profile(ProfileParams(3, 2.0, 1.0));
  const EnergyReport ref = energy(density_from_profile(p), 2.0);
  if (std::abs(res.energy - ref.total) > 0.01 * std::abs(ref.total))
    fail << "minimizer energy " << res.energy << " vs " << ref.total << "; ";
  double l1 = 0.0;
  for (int i = 0; i < res.density.n; ++i)
    l1 += std::abs(res.density.rho[i] - p.psi_at(res.density.mid(i))) *
          res.density.vol[i];
  if (l1 > 0.02 * M) fail << "L1 distance " << l1 << " > 2% of mass; ";

  const MuCurve curve = mu_curve(3, 2.0, M, {3.0, 4.0, 5.0, 6.0, 8.0}, 512, {}, 1,
                                 1e-8);
  if (!curve.nonincreasing) fail << "mu curve not nonincreasing; ";
  const double a = curve.points[3].mu, b = curve.points[4].mu;
  if (std::abs(b - a) > 0.005 * std::abs(a))
    fail << "mu curve not flat past R*: " << a << " vs " << b << "; ";
  return fail.str();
}

std::string check_energy_machinery() {
  std::ostringstream fail;
  // uniform ball interaction
  const int n = 2049;
  std::vector<double> r(n), rho(n, 1.0);
  for (int i = 0; i < n; ++i) r[i] = double(i) / (n - 1);
  const EnergyReport ball = energy(make_radial_density(3, r, rho), 2.0);
  if (std::abs(ball.interaction - 4.0 * kPi / 15.0) > 1e-8)
    fail << "ball interaction " << ball.interaction << " vs 4pi/15; ";

  // gradient of the discrete energy against central differences
  std::mt19937 rng(321);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double m = (trial % 3 == 0) ? 1.5 : (trial % 3 == 1) ? 2.0 : 3.0;
    DiscreteDensity d = init_uniform(3, 1.0, 2.0, 48);
    for (double& v : d.rho) v = unif(rng);
    const DiscreteEnergy e = discrete_energy(d, m);
    double scale = 0.0;
    for (double g : e.gradient) scale = std::max(scale, std::abs(g));
    for (int i = 0; i < d.n; i += 5) {
      DiscreteDensity up = d, dn = d;
      up.rho[i] += 1e-6;
      dn.rho[i] -= 1e-6;
      const double fd =
          (discrete_energy(up, m).value - discrete_energy(dn, m).value) / 2e-6;
      if (std::abs(e.gradient[i] - fd) > 1e-6 * scale) {
        fail << "gradient mismatch " << std::abs(e.gradient[i] - fd) / scale
             << " at trial " << trial << " cell " << i << "; ";
        break;
      }
    }
  }

  // every tested density sits above the mass-only lower bound
  std::vector<std::pair<RadialDensity, double>> corpus;
  corpus.emplace_back(make_radial_density(3, r, rho), 2.0);
  std::vector<double> rg(n), gauss(n);
  for (int i = 0; i < n; ++i) {
    rg[i] = 4.0 * i / (n - 1);
    gauss[i] = std::exp(-0.5 * rg[i] * rg[i]);
  }
  corpus.emplace_back(make_radial_density(3, rg, gauss), 1.5);
  for (auto [N, m] : {std::pair{3, 2.0}, {3, 1.5}, {4, 2.0}})
    corpus.emplace_back(density_from_profile(solve_profile(ProfileParams(N, m, 1.0))),
                        m);
  for (double M : {1.0, 10.0, 100.0}) {
    std::vector<double> rb(513), rhob(513, M / ball_volume(3, 1.0));
    for (int i = 0; i < 513; ++i) rb[i] = double(i) / 512;
    corpus.emplace_back(make_radial_density(3, rb, rhob), 2.0);
  }
  for (const auto& [d, m] : corpus) {
    const EnergyReport rep = energy(d, m);
    if (rep.total < rep.lower_bound)
      fail << "E = " << rep.total << " below bound " << rep.lower_bound << "; ";
  }
  return fail.str();
}

std::string check_boundary_flatness() {
  std::ostringstream fail;
  for (auto [N, m] : admissible_matrix()) {
    const RadialProfile p = solve_profile(ProfileParams(N, m, 1.0));
    for (double delta : {0.5, 1.0}) {
      const BoundaryFlatness flat = boundary_flatness(p, delta, {1e-2, 1e-3, 1e-4});
      if (!flat.decreasing)
        fail << "not decreasing at (" << N << "," << m << ",delta=" << delta << "); ";
      if (!(flat.max_gradient.back() < 1e-3))
        fail << "max " << flat.max_gradient.back() << " >= 1e-3 at (" << N << ","
             << m << ",delta=" << delta << "); ";
    }
  }
  return fail.str();
}

std::string check_critical_rejection() {
  std::ostringstream fail;
  try {
    alpha_of_mass(3, 2.0 - 2.0 / 3.0, 5.0);
    fail << "alpha_of_mass accepted the critical exponent; ";
  } catch (const CriticalCaseError&) {
  } catch (...) {
    fail << "alpha_of_mass threw the wrong error for m = 2 - 2/N; ";
  }
  try {
    cli::parse({"profile", "--N", "4", "--m", "1.5"});
    fail << "parse accepted the critical exponent; ";
  } catch (const CriticalCaseError&) {
  } catch (...) {
    fail << "parse threw the wrong error for m = 2 - 2/N; ";
  }
  return fail.str();
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "closed-form support radii (N=3 and N=5, m=2)", check_support_radii},
      {2, "closed-form canonical mass and alpha(M) round trips", check_closed_form_mass},
      {3, "scaling collapse and fitted mass-law slope", check_scaling_collapse},
      {4, "obstacle identity on the admissible matrix", check_obstacle_identity},
      {5, "phase-plane invariants and eigenstructure", check_phase_invariants},
      {6, "picard / runge-kutta oracle equivalence", check_picard_equivalence},
      {7, "variational cross-check against the direct minimizer", check_variational_cross},
      {8, "energy machinery: ball closed form, gradients, lower bound",
       check_energy_machinery},
      {9, "boundary flatness of psi^{1+delta/(m-1)}", check_boundary_flatness},
      {10, "critical-case rejection with the dedicated error", check_critical_rejection},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    std::string detail;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      std::printf("[PASS] criterion %2d: %s\n", c.id, c.name.c_str());
    } else {
      std::printf("[FAIL] criterion %2d: %s -- %s\n", c.id, c.name.c_str(),
                  detail.c_str());
      ++failures;
    }
  }
  if (failures)
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  else
    std::printf("all %zu criteria passed\n", criteria.size());
  return failures;
}
