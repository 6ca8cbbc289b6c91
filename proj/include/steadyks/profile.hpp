#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "steadyks/common.hpp"
#include "steadyks/dense_rk.hpp"

// The radial profile type shared by every module: a uniform grid of
// (r, psi, dpsi) samples plus an evaluator ("curve") that can interpolate
// the profile anywhere in [0, r_star].

namespace steadyks {

/// Evaluator behind a RadialProfile.  psi is clamped to 0 beyond the
/// support radius.
class RadialCurve {
 public:
  virtual ~RadialCurve() = default;
  virtual double psi(double r) const = 0;
  virtual double dpsi(double r) const = 0;
  virtual double ddpsi(double r) const = 0;
};

/// Curve backed by arbitrary callables; used for closed-form profiles.
class FunctionCurve final : public RadialCurve {
 public:
  using Fn = std::function<double(double)>;
  FunctionCurve(Fn psi, Fn dpsi, Fn ddpsi)
      : psi_(std::move(psi)), dpsi_(std::move(dpsi)), ddpsi_(std::move(ddpsi)) {}
  double psi(double r) const override { return psi_(r); }
  double dpsi(double r) const override { return dpsi_(r); }
  double ddpsi(double r) const override { return ddpsi_(r); }

 private:
  Fn psi_, dpsi_, ddpsi_;
};

/// Solver-produced curve: quadratic series on [0, r0], dense Runge-Kutta
/// output on [r0, r_star], zero beyond.
class DenseRkCurve final : public RadialCurve {
 public:
  DenseRkCurve(double alpha, double curvature, double quartic, double r0,
               std::vector<DenseSegment> segments, double r_star)
      : alpha_(alpha),
        c_(curvature),
        d_(quartic),
        r0_(r0),
        segments_(std::move(segments)),
        r_star_(r_star) {}

  double psi(double r) const override {
    if (r >= r_star_) return 0.0;
    if (r <= r0_) return alpha_ - 0.5 * c_ * r * r + d_ * r * r * r * r;
    return std::max(0.0, segment(r).value(0, r));
  }
  double dpsi(double r) const override {
    if (r > r_star_) return 0.0;
    if (r <= r0_) return -c_ * r + 4.0 * d_ * r * r * r;
    if (r == r_star_) return segment(r).value(1, r);
    return segment(r).value(1, r);
  }
  double ddpsi(double r) const override {
    if (r > r_star_) return 0.0;
    if (r <= r0_) return -c_ + 12.0 * d_ * r * r;
    return segment(r).derivative(1, r);
  }
  double startup_radius() const { return r0_; }

 private:
  const DenseSegment& segment(double r) const {
    auto it = std::upper_bound(
        segments_.begin(), segments_.end(), r,
        [](double rr, const DenseSegment& s) { return rr < s.t0; });
    if (it != segments_.begin()) --it;
    return *it;
  }

  double alpha_, c_, d_, r0_;
  std::vector<DenseSegment> segments_;
  double r_star_;
};

/// Piecewise-cubic Hermite curve through (r, psi, dpsi) samples; this is
/// what deserialized profiles evaluate through.
class HermiteCurve final : public RadialCurve {
 public:
  HermiteCurve(std::vector<double> r, std::vector<double> psi,
               std::vector<double> dpsi)
      : r_(std::move(r)), psi_(std::move(psi)), dpsi_(std::move(dpsi)) {}

  double psi(double r) const override {
    if (r >= r_.back()) return 0.0;
    const auto [i, t, h] = locate(r);
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * psi_[i] + h10 * h * dpsi_[i] + h01 * psi_[i + 1] +
           h11 * h * dpsi_[i + 1];
  }
  double dpsi(double r) const override {
    if (r > r_.back()) return 0.0;
    const auto [i, t, h] = locate(std::min(r, r_.back()));
    const double d00 = 6 * t * (t - 1);
    const double d10 = (1 - t) * (1 - 3 * t);
    const double d01 = -d00;
    const double d11 = t * (3 * t - 2);
    return (d00 * psi_[i] + d01 * psi_[i + 1]) / h + d10 * dpsi_[i] +
           d11 * dpsi_[i + 1];
  }
  double ddpsi(double r) const override {
    if (r > r_.back()) return 0.0;
    const auto [i, t, h] = locate(std::min(r, r_.back()));
    const double s00 = (12 * t - 6) / (h * h);
    const double s10 = (6 * t - 4) / h;
    const double s11 = (6 * t - 2) / h;
    return s00 * (psi_[i] - psi_[i + 1]) + s10 * dpsi_[i] + s11 * dpsi_[i + 1];
  }

 private:
  struct Local {
    std::size_t i;
    double t;
    double h;
  };
  Local locate(double r) const {
    auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t i = (it == r_.begin()) ? 0 : static_cast<std::size_t>(it - r_.begin()) - 1;
    i = std::min(i, r_.size() - 2);
    const double h = r_[i + 1] - r_[i];
    return {i, (r - r_[i]) / h, h};
  }

  std::vector<double> r_, psi_, dpsi_;
};

/// Solution of the radial profile equation: uniform grid over [0, r_star]
/// with psi, dpsi samples, the support radius and an evaluator.
struct RadialProfile {
  ProfileParams params;
  std::vector<double> r;
  std::vector<double> psi;
  std::vector<double> dpsi;
  double r_star = 0.0;
  double r_star_error = 0.0;  // estimate, not serialized
  std::shared_ptr<const RadialCurve> curve;

  double psi_at(double rr) const { return curve->psi(rr); }
  double dpsi_at(double rr) const { return curve->dpsi(rr); }
  double ddpsi_at(double rr) const { return curve->ddpsi(rr); }

  /// Enforces the documented invariants; throws InvalidParamsError with a
  /// description of the first violation.
  void validate() const {
    const double alpha = params.alpha;
    if (r.empty() || r.front() != 0.0)
      throw InvalidParamsError("profile grid must start at 0");
    if (psi.front() != alpha || dpsi.front() != 0.0)
      throw InvalidParamsError("profile must start at (alpha, 0)");
    if (r.back() != r_star)
      throw InvalidParamsError("last grid point must equal r_star");
    if (!(r_star > 0.0) || !std::isfinite(r_star))
      throw InvalidParamsError("r_star must be positive and finite");
    if (psi.back() > 1e-12 * alpha)
      throw InvalidParamsError("psi(r_star) must vanish");
    const double dpsi_bound =
        (params.m - 1.0) * r_star * pow_clamped(alpha, params.density_power()) /
        (params.m * params.N);
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      if (!(r[i] > r[i - 1]))
        throw InvalidParamsError("grid must be strictly increasing");
      if (!(psi[i] > 0.0))
        throw InvalidParamsError("psi must be positive inside the support");
      if (!(dpsi[i] < 0.0))
        throw InvalidParamsError("dpsi must be negative inside the support");
    }
    for (double d : dpsi)
      if (std::abs(d) > dpsi_bound * (1.0 + 1e-9))
        throw InvalidParamsError("|dpsi| exceeds the (m-1) R* alpha^{1/(m-1)}/(mN) bound");
  }
};

/// Rebuilds the evaluator for a profile whose arrays came from a file.
inline void attach_hermite_curve(RadialProfile& p) {
  p.curve = std::make_shared<HermiteCurve>(p.r, p.psi, p.dpsi);
}

}  // namespace steadyks
