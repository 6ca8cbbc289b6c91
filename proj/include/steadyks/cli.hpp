#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "steadyks/ball_minimizer.hpp"
#include "steadyks/free_energy.hpp"
#include "steadyks/io.hpp"
#include "steadyks/lane_emden.hpp"
#include "steadyks/obstacle.hpp"
#include "steadyks/phase_plane.hpp"
#include "steadyks/scaling.hpp"

// Command-line front end.  parse() validates every numeric flag against the
// module preconditions before anything runs; execute() dispatches to the
// owning module and reports through exit codes:
//   0  success
//   1  a verification reported a violation
//   2  numerical failure (solver error or non-convergence)
//   64 usage error
// A TOML config file (--config, or the STEADY_KS_CONFIG environment
// variable) may set defaults for tolerances; explicit flags override it.

namespace steadyks::cli {

class UsageError : public Error {
  using Error::Error;
};

enum class Subcommand { profile, mass_map, phase, energy, verify, minimize, mu_curve };
enum class Format { json, csv };

struct Command {
  Subcommand sub = Subcommand::profile;
  int N = 3;
  double m = 2.0;
  std::optional<double> alpha;
  std::optional<double> mass;
  std::vector<double> alphas;
  std::vector<double> radii;
  double radius = 6.0;
  int cells = 512;
  double opt_tol = 1e-10;
  double kkt_tol = 1e-6;
  int max_iter = 20000;
  int jobs = 1;
  double rtol = 1e-10;
  int grid = 2048;
  std::string input;
  std::string output = "-";
  std::string report;
  std::string density_csv;
  Format format = Format::json;

  SolveOptions solve_options() const {
    SolveOptions o;
    o.rtol = rtol;
    o.grid_points = grid;
    return o;
  }
  MinimizeOptions minimize_options() const {
    MinimizeOptions o;
    o.tol = opt_tol;
    o.kkt_tol = kkt_tol;
    o.max_iter = max_iter;
    return o;
  }
};

struct ParseResult {
  std::optional<Command> command;  // empty when help was requested
  std::string help_text;
};

namespace detail {

inline std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline void add_problem_flags(CLI::App* sub, Command& cmd, bool with_alpha) {
  sub->add_option("--N", cmd.N, "space dimension (>= 3)");
  sub->add_option("--m", cmd.m, "diffusion exponent (> 2 - 2/N)");
  if (with_alpha) {
    cmd.alpha.reset();
    cmd.mass.reset();
    sub->add_option_function<double>(
        "--alpha", [&cmd](double a) { cmd.alpha = a; }, "central value psi(0)");
    sub->add_option_function<double>(
        "--mass", [&cmd](double M) { cmd.mass = M; },
        "total mass (resolves alpha through the mass map)");
  }
}

inline void add_solver_flags(CLI::App* sub, Command& cmd) {
  sub->add_option("--rtol", cmd.rtol, "integrator relative tolerance");
  sub->add_option("--grid", cmd.grid, "output grid resolution");
}

}  // namespace detail

/// Builds the CLI, parses argv (program name excluded) and validates every
/// numeric flag.  Throws UsageError for malformed invocations and the
/// domain errors (InvalidParamsError, CriticalCaseError) for values outside
/// the module preconditions.
inline ParseResult parse(std::vector<std::string> argv) {
  Command cmd;
  CLI::App app{"steady states of the diffusion-dominated chemotaxis system"};
  app.require_subcommand(1);
  const char* env_config = std::getenv("STEADY_KS_CONFIG");
  app.set_config("--config", env_config ? env_config : "",
                 "TOML file with default tolerances");

  std::string alphas_csv, radii_csv;

  CLI::App* profile = app.add_subcommand("profile", "solve one radial profile");
  detail::add_problem_flags(profile, cmd, true);
  detail::add_solver_flags(profile, cmd);
  profile->add_option("--output", cmd.output, "output path ('-' for stdout)");
  profile->add_option("--format", cmd.format, "json or csv")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Format>{{"json", Format::json}, {"csv", Format::csv}}));

  CLI::App* mass_map = app.add_subcommand("mass-map", "alpha,r_star,mass table");
  detail::add_problem_flags(mass_map, cmd, false);
  detail::add_solver_flags(mass_map, cmd);
  mass_map->add_option("--alphas", alphas_csv, "comma-separated central values")
      ->required();
  mass_map->add_option("--output", cmd.output, "output path");

  CLI::App* phase = app.add_subcommand("phase", "phase-plane trajectory and report");
  detail::add_problem_flags(phase, cmd, true);
  detail::add_solver_flags(phase, cmd);
  phase->add_option("--output", cmd.output, "trajectory CSV path");
  phase->add_option("--report", cmd.report, "fixed-point/invariant JSON path");

  CLI::App* energy_cmd = app.add_subcommand("energy", "free energy of a profile");
  energy_cmd->add_option("--input", cmd.input, "profile JSON or CSV")->required();
  detail::add_problem_flags(energy_cmd, cmd, false);
  energy_cmd->add_option("--output", cmd.output, "EnergyReport JSON path");

  CLI::App* verify = app.add_subcommand("verify", "obstacle-problem verification");
  verify->add_option("--input", cmd.input, "profile JSON")->required();
  verify->add_option("--output", cmd.output, "ObstacleReport JSON path");

  CLI::App* minimize_cmd =
      app.add_subcommand("minimize", "direct free-energy minimization on a ball");
  detail::add_problem_flags(minimize_cmd, cmd, false);
  minimize_cmd->add_option_function<double>(
      "--mass", [&cmd](double M) { cmd.mass = M; }, "total mass")->required();
  minimize_cmd->add_option("--radius", cmd.radius, "ball radius");
  minimize_cmd->add_option("--cells", cmd.cells, "radial cell count");
  minimize_cmd->add_option("--tol", cmd.opt_tol, "energy stall tolerance");
  minimize_cmd->add_option("--kkt-tol", cmd.kkt_tol, "obstacle-condition tolerance");
  minimize_cmd->add_option("--max-iter", cmd.max_iter, "iteration budget");
  minimize_cmd->add_option("--output", cmd.output, "MinimizeResult JSON path");
  minimize_cmd->add_option("--density-csv", cmd.density_csv, "density CSV path");

  CLI::App* mu_curve_cmd =
      app.add_subcommand("mu-curve", "minimal energy as a function of the ball radius");
  detail::add_problem_flags(mu_curve_cmd, cmd, false);
  mu_curve_cmd->add_option_function<double>(
      "--mass", [&cmd](double M) { cmd.mass = M; }, "total mass")->required();
  mu_curve_cmd->add_option("--radii", radii_csv, "comma-separated increasing radii")
      ->required();
  mu_curve_cmd->add_option("--cells", cmd.cells, "cells at the largest radius");
  mu_curve_cmd->add_option("--jobs", cmd.jobs, "parallel minimizations");
  mu_curve_cmd->add_option("--output", cmd.output, "R,mu CSV path");

  try {
    std::reverse(argv.begin(), argv.end());
    app.parse(std::move(argv));
  } catch (const CLI::CallForHelp&) {
    return {std::nullopt, app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (profile->parsed()) cmd.sub = Subcommand::profile;
  if (mass_map->parsed()) cmd.sub = Subcommand::mass_map;
  if (phase->parsed()) cmd.sub = Subcommand::phase;
  if (energy_cmd->parsed()) cmd.sub = Subcommand::energy;
  if (verify->parsed()) cmd.sub = Subcommand::verify;
  if (minimize_cmd->parsed()) cmd.sub = Subcommand::minimize;
  if (mu_curve_cmd->parsed()) cmd.sub = Subcommand::mu_curve;

  // validate numeric flags against the module preconditions before dispatch
  const bool needs_params = cmd.sub != Subcommand::energy && cmd.sub != Subcommand::verify;
  if (needs_params) require_diffusion_dominated(cmd.N, cmd.m);
  if (cmd.sub == Subcommand::energy) {
    if (detail::ends_with(cmd.input, ".csv") &&
        (energy_cmd->count("--N") == 0 || energy_cmd->count("--m") == 0))
      throw UsageError("energy: csv profiles carry no parameters, pass --N and --m");
    if (energy_cmd->count("--m") > 0) require_diffusion_dominated(cmd.N, cmd.m);
  }
  if (cmd.sub == Subcommand::verify && detail::ends_with(cmd.input, ".csv"))
    throw UsageError("verify reads profile JSON");
  if (cmd.alpha && cmd.mass)
    throw UsageError("--alpha and --mass are mutually exclusive");
  if (cmd.alpha && !(*cmd.alpha > 0.0))
    throw InvalidParamsError("--alpha must be positive");
  if (cmd.mass && !(*cmd.mass > 0.0))
    throw InvalidParamsError("--mass must be positive");
  if (!(cmd.rtol > 0.0) || cmd.rtol > 1e-2)
    throw InvalidParamsError("--rtol must lie in (0, 1e-2]");
  if (cmd.grid < 16) throw InvalidParamsError("--grid must be at least 16");
  if (cmd.sub == Subcommand::minimize || cmd.sub == Subcommand::mu_curve) {
    if (cmd.cells < 16) throw InvalidParamsError("--cells must be at least 16");
    if (!(cmd.radius > 0.0)) throw InvalidParamsError("--radius must be positive");
    if (cmd.jobs < 1) throw InvalidParamsError("--jobs must be at least 1");
  }
  if (mass_map->parsed()) {
    cmd.alphas = detail::parse_list(alphas_csv);
    if (cmd.alphas.empty()) throw UsageError("--alphas must list at least one value");
    for (double a : cmd.alphas)
      if (!(a > 0.0)) throw InvalidParamsError("--alphas entries must be positive");
  }
  if (mu_curve_cmd->parsed()) {
    cmd.radii = detail::parse_list(radii_csv);
    if (cmd.radii.empty()) throw UsageError("--radii must list at least one value");
    if (!std::is_sorted(cmd.radii.begin(), cmd.radii.end()) ||
        !(cmd.radii.front() > 0.0))
      throw InvalidParamsError("--radii must be positive and increasing");
  }
  return {cmd, ""};
}

namespace detail {

inline void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open output file: " + path);
  out << content;
}

inline std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline RadialProfile load_profile(const Command& cmd) {
  const std::string text = read_input(cmd.input);
  if (ends_with(cmd.input, ".csv")) return profile_from_csv(text, cmd.N, cmd.m);
  return profile_from_json(ordered_json::parse(text));
}

inline double resolve_alpha(const Command& cmd) {
  if (cmd.alpha) return *cmd.alpha;
  if (cmd.mass) return alpha_of_mass(cmd.N, cmd.m, *cmd.mass, cmd.solve_options());
  return 1.0;
}

}  // namespace detail

/// Dispatches a parsed command.  Returns the process exit code.
inline int execute(const Command& cmd) {
  switch (cmd.sub) {
    case Subcommand::profile: {
      const ProfileParams params(cmd.N, cmd.m, detail::resolve_alpha(cmd));
      const RadialProfile p = solve_profile(params, cmd.solve_options());
      detail::write_output(cmd.output, cmd.format == Format::csv
                                           ? profile_to_csv(p)
                                           : profile_to_json(p).dump(2) + "\n");
      return 0;
    }
    case Subcommand::mass_map: {
      const auto map = canonical_profile(cmd.N, cmd.m, cmd.solve_options());
      std::vector<std::array<double, 3>> rows;
      for (double a : cmd.alphas) {
        const RadialProfile p = rescale(*map, a);
        rows.push_back({a, p.r_star, mass_of_profile(p)});
      }
      detail::write_output(cmd.output, mass_map_to_csv(rows));
      return 0;
    }
    case Subcommand::phase: {
      const ProfileParams params(cmd.N, cmd.m, detail::resolve_alpha(cmd));
      const RadialProfile p = solve_profile(params, cmd.solve_options());
      const std::vector<PhaseState> states = to_phase(p);
      const BarrierParams barrier = barrier_epsilon(cmd.N, cmd.m);
      const PhaseInvariantReport inv = check_invariants(states, cmd.N, cmd.m);
      detail::write_output(cmd.output, phase_to_csv(states, barrier));
      if (!cmd.report.empty())
        detail::write_output(
            cmd.report,
            phase_report_to_json(fixed_points(cmd.N, cmd.m), inv).dump(2) + "\n");
      return (inv.all_passed() && inv.divergence_observed) ? 0 : 1;
    }
    case Subcommand::energy: {
      const RadialProfile p = detail::load_profile(cmd);
      const EnergyReport rep = energy(density_from_profile(p), p.params.m);
      detail::write_output(cmd.output, energy_report_to_json(rep).dump(2) + "\n");
      return rep.total >= rep.lower_bound ? 0 : 1;
    }
    case Subcommand::verify: {
      const RadialProfile p = detail::load_profile(cmd);
      const ObstacleReport rep = verify_obstacle(p);
      detail::write_output(cmd.output, obstacle_report_to_json(rep).dump(2) + "\n");
      return rep.passed ? 0 : 1;
    }
    case Subcommand::minimize: {
      const MinimizeResult res = minimize(cmd.N, cmd.m, *cmd.mass, cmd.radius,
                                          cmd.cells, cmd.minimize_options());
      detail::write_output(cmd.output, minimize_result_to_json(res).dump(2) + "\n");
      if (!cmd.density_csv.empty())
        detail::write_output(cmd.density_csv, density_to_csv(res.density));
      return res.converged ? 0 : 2;
    }
    case Subcommand::mu_curve: {
      const MuCurve curve = mu_curve(cmd.N, cmd.m, *cmd.mass, cmd.radii, cmd.cells,
                                     cmd.minimize_options(), cmd.jobs);
      detail::write_output(cmd.output, mu_curve_to_csv(curve));
      for (const auto& pt : curve.points)
        if (!pt.converged) return 2;
      return curve.nonincreasing ? 0 : 1;
    }
  }
  return 64;
}

/// Full entry point used by the binary: parse, execute, map errors to exit
/// codes (64 usage, 2 numerical).
inline int run(std::vector<std::string> argv) {
  try {
    ParseResult parsed = parse(std::move(argv));
    if (!parsed.command) {
      std::cout << parsed.help_text;
      return 0;
    }
    return execute(*parsed.command);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 64;
  } catch (const InvalidParamsError& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return 64;
  } catch (const SolverError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 64;
  }
}

}  // namespace steadyks::cli
