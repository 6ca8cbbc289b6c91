#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "steadyks/common.hpp"

// Embedded Dormand-Prince 5(4) pair with the classical quartic continuous
// extension, specialised to two-component systems.  The dense coefficients
// of every accepted step are kept so that downstream code can evaluate the
// solution (and its derivative) anywhere without re-integrating.

namespace steadyks {

using State2 = std::array<double, 2>;

/// Dense-output polynomial of one accepted step,
/// y(t0 + theta h) = c1 + theta (c2 + (1-theta)(c3 + theta (c4 + (1-theta) c5))).
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<std::array<double, 5>, 2> c{};

  double value(int comp, double t) const {
    const double th = (t - t0) / h;
    const auto& a = c[comp];
    return a[0] + th * (a[1] + (1.0 - th) * (a[2] + th * (a[3] + (1.0 - th) * a[4])));
  }

  /// d/dt of the dense polynomial.
  double derivative(int comp, double t) const {
    const double th = (t - t0) / h;
    const auto& a = c[comp];
    const double dth = a[1] + a[2] * (1.0 - 2.0 * th) + a[3] * th * (2.0 - 3.0 * th) +
                       a[4] * 2.0 * th * (1.0 - th) * (1.0 - 2.0 * th);
    return dth / h;
  }
};

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-14;
  double max_step = 0.0;  // 0 disables the cap
  double safety = 0.9;
};

template <class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, StepControl ctrl) : rhs_(std::move(rhs)), ctrl_(ctrl) {}

  void start(double t0, const State2& y0, double h0) {
    t_ = t0;
    y_ = y0;
    h_ = h0;
    rhs_(t_, y_, k_[0]);
  }

  double time() const { return t_; }
  const State2& state() const { return y_; }

  /// Advances by one accepted step, filling `seg` with its dense output.
  /// Throws SolverError if the controller underflows.
  DenseSegment step() {
    for (int attempt = 0; attempt < 64; ++attempt) {
      if (ctrl_.max_step > 0.0 && h_ > ctrl_.max_step) h_ = ctrl_.max_step;
      if (!(h_ > 1e-14 * std::max(1.0, std::abs(t_))))
        throw SolverError("dopri5: step size underflow at t = " + std::to_string(t_));

      State2 y1;
      const double err = attempt_step(y1);
      double fac = ctrl_.safety * std::pow(err > 1e-30 ? err : 1e-30, -0.2);
      fac = std::min(5.0, std::max(0.2, fac));
      if (err <= 1.0) {
        DenseSegment seg = make_dense(y1);
        t_ += h_;
        y_ = y1;
        k_[0] = k_[6];  // first-same-as-last
        h_ *= fac;
        return seg;
      }
      h_ *= fac;
    }
    throw SolverError("dopri5: repeated step rejection at t = " + std::to_string(t_));
  }

 private:
  double attempt_step(State2& y1) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double h = h_;
    State2 tmp;
    for (int i = 0; i < 2; ++i) tmp[i] = y_[i] + h * a21 * k_[0][i];
    rhs_(t_ + h / 5.0, tmp, k_[1]);
    for (int i = 0; i < 2; ++i)
      tmp[i] = y_[i] + h * (a31 * k_[0][i] + a32 * k_[1][i]);
    rhs_(t_ + 3.0 * h / 10.0, tmp, k_[2]);
    for (int i = 0; i < 2; ++i)
      tmp[i] = y_[i] + h * (a41 * k_[0][i] + a42 * k_[1][i] + a43 * k_[2][i]);
    rhs_(t_ + 4.0 * h / 5.0, tmp, k_[3]);
    for (int i = 0; i < 2; ++i)
      tmp[i] = y_[i] + h * (a51 * k_[0][i] + a52 * k_[1][i] + a53 * k_[2][i] +
                            a54 * k_[3][i]);
    rhs_(t_ + 8.0 * h / 9.0, tmp, k_[4]);
    for (int i = 0; i < 2; ++i)
      tmp[i] = y_[i] + h * (a61 * k_[0][i] + a62 * k_[1][i] + a63 * k_[2][i] +
                            a64 * k_[3][i] + a65 * k_[4][i]);
    rhs_(t_ + h, tmp, k_[5]);
    for (int i = 0; i < 2; ++i)
      y1[i] = y_[i] + h * (a71 * k_[0][i] + a73 * k_[2][i] + a74 * k_[3][i] +
                           a75 * k_[4][i] + a76 * k_[5][i]);
    rhs_(t_ + h, y1, k_[6]);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double ei = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] +
                             e5 * k_[4][i] + e6 * k_[5][i] + e7 * k_[6][i]);
      const double sc = ctrl_.atol + ctrl_.rtol * std::max(std::abs(y_[i]), std::abs(y1[i]));
      err += (ei / sc) * (ei / sc);
    }
    return std::sqrt(err / 2.0);
  }

  DenseSegment make_dense(const State2& y1) const {
    static constexpr double d1 = -12715105075.0 / 11282082432.0;
    static constexpr double d3 = 87487479700.0 / 32700410799.0;
    static constexpr double d4 = -10690763975.0 / 1880347072.0;
    static constexpr double d5 = 701980252875.0 / 199316789632.0;
    static constexpr double d6 = -1453857185.0 / 822651844.0;
    static constexpr double d7 = 69997945.0 / 29380423.0;

    DenseSegment seg;
    seg.t0 = t_;
    seg.h = h_;
    for (int i = 0; i < 2; ++i) {
      const double ydiff = y1[i] - y_[i];
      const double bspl = h_ * k_[0][i] - ydiff;
      seg.c[i][0] = y_[i];
      seg.c[i][1] = ydiff;
      seg.c[i][2] = bspl;
      seg.c[i][3] = ydiff - h_ * k_[6][i] - bspl;
      seg.c[i][4] = h_ * (d1 * k_[0][i] + d3 * k_[2][i] + d4 * k_[3][i] +
                          d5 * k_[4][i] + d6 * k_[5][i] + d7 * k_[6][i]);
    }
    return seg;
  }

  Rhs rhs_;
  StepControl ctrl_;
  double t_ = 0.0;
  double h_ = 0.0;
  State2 y_{};
  std::array<State2, 7> k_{};
};

}  // namespace steadyks
