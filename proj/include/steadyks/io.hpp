#pragma once

#include <array>
#include <charconv>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "steadyks/ball_minimizer.hpp"
#include "steadyks/free_energy.hpp"
#include "steadyks/obstacle.hpp"
#include "steadyks/phase_plane.hpp"
#include "steadyks/profile.hpp"

// File formats.  JSON uses insertion-ordered objects and CSV uses the
// shortest round-trip representation of every double, so identical inputs
// produce byte-identical outputs.

namespace steadyks {

using ordered_json = nlohmann::ordered_json;

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline ordered_json profile_to_json(const RadialProfile& p) {
  ordered_json j;
  j["N"] = p.params.N;
  j["m"] = p.params.m;
  j["alpha"] = p.params.alpha;
  j["r_star"] = p.r_star;
  j["r"] = p.r;
  j["psi"] = p.psi;
  j["dpsi"] = p.dpsi;
  return j;
}

inline RadialProfile profile_from_json(const ordered_json& j) {
  ProfileParams params(j.at("N").get<int>(), j.at("m").get<double>(),
                       j.at("alpha").get<double>());
  RadialProfile p{params, j.at("r").get<std::vector<double>>(),
                  j.at("psi").get<std::vector<double>>(),
                  j.at("dpsi").get<std::vector<double>>(),
                  j.at("r_star").get<double>(), 0.0, nullptr};
  if (p.r.size() != p.psi.size() || p.r.size() != p.dpsi.size() || p.r.size() < 4)
    throw InvalidParamsError("profile json: mismatched or too-short arrays");
  attach_hermite_curve(p);
  return p;
}

inline std::string profile_to_csv(const RadialProfile& p) {
  std::string out = "r,psi,dpsi\n";
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    out += format_double(p.r[i]);
    out += ',';
    out += format_double(p.psi[i]);
    out += ',';
    out += format_double(p.dpsi[i]);
    out += '\n';
  }
  return out;
}

inline RadialProfile profile_from_csv(const std::string& csv, int N, double m) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.rfind("r,psi,dpsi", 0) != 0)
    throw InvalidParamsError("profile csv: missing r,psi,dpsi header");
  std::vector<double> r, psi, dpsi;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    double vals[3];
    for (double& v : vals) {
      if (!std::getline(row, cell, ',')) throw InvalidParamsError("profile csv: short row");
      v = std::stod(cell);
    }
    r.push_back(vals[0]);
    psi.push_back(vals[1]);
    dpsi.push_back(vals[2]);
  }
  if (r.size() < 4) throw InvalidParamsError("profile csv: too few rows");
  ProfileParams params(N, m, psi.front());
  RadialProfile p{params, std::move(r), std::move(psi), std::move(dpsi), 0.0, 0.0,
                  nullptr};
  p.r_star = p.r.back();
  attach_hermite_curve(p);
  return p;
}

inline ordered_json energy_report_to_json(const EnergyReport& rep) {
  ordered_json j;
  j["entropy"] = rep.entropy;
  j["interaction"] = rep.interaction;
  j["total"] = rep.total;
  j["lower_bound"] = rep.lower_bound;
  return j;
}

inline ordered_json obstacle_report_to_json(const ObstacleReport& rep) {
  ordered_json j;
  j["c_hat"] = rep.c_hat;
  j["inside_residual"] = rep.inside_residual;
  j["inside_residual_rel"] = rep.inside_residual_rel;
  j["outside_margin"] = rep.outside_margin;
  j["c_hat_consistency"] = rep.c_hat_consistency;
  j["inside_ok"] = rep.inside_ok;
  j["outside_ok"] = rep.outside_ok;
  j["consistency_ok"] = rep.consistency_ok;
  j["passed"] = rep.passed;
  return j;
}

inline ordered_json minimize_result_to_json(const MinimizeResult& res) {
  ordered_json j;
  j["energy"] = res.energy;
  j["iterations"] = res.iterations;
  j["kkt_residual"] = res.kkt_residual;
  j["converged"] = res.converged;
  return j;
}

inline std::string density_to_csv(const DiscreteDensity& d) {
  std::string out = "r,rho\n";
  for (int i = 0; i < d.n; ++i) {
    out += format_double(d.mid(i));
    out += ',';
    out += format_double(d.rho[i]);
    out += '\n';
  }
  return out;
}

inline std::string mu_curve_to_csv(const MuCurve& curve) {
  std::string out = "R,mu\n";
  for (const auto& pt : curve.points) {
    out += format_double(pt.R);
    out += ',';
    out += format_double(pt.mu);
    out += '\n';
  }
  return out;
}

inline std::string mass_map_to_csv(const std::vector<std::array<double, 3>>& rows) {
  std::string out = "alpha,r_star,mass\n";
  for (const auto& row : rows) {
    out += format_double(row[0]);
    out += ',';
    out += format_double(row[1]);
    out += ',';
    out += format_double(row[2]);
    out += '\n';
  }
  return out;
}

inline std::string phase_to_csv(const std::vector<PhaseState>& states,
                                const BarrierParams& barrier) {
  std::string out = "s,u,v,z_eps\n";
  for (const auto& st : states) {
    out += format_double(st.s);
    out += ',';
    out += format_double(st.u_hat);
    out += ',';
    out += format_double(st.v_hat);
    out += ',';
    out += format_double(barrier.z(st.u_hat));
    out += '\n';
  }
  return out;
}

inline ordered_json fixed_point_to_json(const FixedPoint& p) {
  ordered_json j;
  j["point"] = p.point;
  j["eigenvalues"] = p.eigenvalues;
  j["eigenvectors"] = p.eigenvectors;
  return j;
}

inline ordered_json phase_report_to_json(const FixedPointReport& fps,
                                         const PhaseInvariantReport& inv) {
  ordered_json j;
  j["fixed_points"]["P1"] = fixed_point_to_json(fps.p1);
  j["fixed_points"]["P2"] = fixed_point_to_json(fps.p2);
  j["fixed_points"]["P3"] = fixed_point_to_json(fps.p3);
  ordered_json ji;
  ji["u_below_N"] = {{"passed", inv.u_below_N.passed}, {"margin", inv.u_below_N.margin}};
  ji["u_decreasing"] = {{"passed", inv.u_decreasing.passed},
                        {"margin", inv.u_decreasing.margin}};
  ji["barrier"] = {{"passed", inv.barrier.passed}, {"margin", inv.barrier.margin}};
  ji["divergence_observed"] = inv.divergence_observed;
  ji["max_v"] = inv.max_v;
  j["invariants"] = ji;
  return j;
}

}  // namespace steadyks
