#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "loggas/errors.hpp"

namespace loggas {

struct OdeOptions {
  double atol = 1e-10;
  double rtol = 1e-9;
  double h_init = 0.0;  // 0: pick from the first derivative
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 2000000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
};

// Dormand–Prince 5(4) with the usual PI-free step control. State is any Eigen
// column vector (real or complex). The observer sees every accepted step as
// (t, y) and may stop the integration by returning false. Integrates
// backwards when t1 < t0. Returns the time reached.
template <class Vec, class Rhs, class Obs>
double dopri45(Rhs&& f, Vec& y, double t0, double t1, const OdeOptions& opt, Obs&& observe,
               OdeStats* stats = nullptr) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (t1 == t0) return t0;
  const double dir = t1 > t0 ? 1.0 : -1.0;
  const double span = std::abs(t1 - t0);
  double t = t0;
  Vec k1 = f(t, y);
  auto scale = [&](const Vec& a, const Vec& b) {
    return (opt.atol + opt.rtol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix().eval();
  };
  double h = opt.h_init;
  if (h <= 0.0) {
    double d0 = (y.cwiseAbs().array() / scale(y, y).array()).maxCoeff();
    double d1 = (k1.cwiseAbs().array() / scale(y, y).array()).maxCoeff();
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, span);
  }
  h = std::min({h, opt.h_max, span});

  long steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > opt.max_steps) throw NumericalError("ode: step budget exhausted");
    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    const double s = dir * h;
    Vec k2 = f(t + c2 * s, (y + s * (a21 * k1)).eval());
    Vec k3 = f(t + c3 * s, (y + s * (a31 * k1 + a32 * k2)).eval());
    Vec k4 = f(t + c4 * s, (y + s * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    Vec k5 = f(t + c5 * s, (y + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    Vec k6 = f(t + s, (y + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    Vec ynew = y + s * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vec k7 = f(t + s, ynew);
    Vec err = s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = (err.cwiseAbs().array() / scale(y, ynew).array()).maxCoeff();
    if (!std::isfinite(en)) {
      if (stats) ++stats->rejected;
      h *= 0.2;
      if (h < 1e-14 * std::max(1.0, std::abs(t))) throw NumericalError("ode: non-finite state");
      continue;
    }
    if (en <= 1.0) {
      t = last ? t1 : t + s;
      y = ynew;
      k1 = k7;
      if (stats) ++stats->accepted;
      if (!observe(t, static_cast<const Vec&>(y))) return t;
      double fac = en == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(en, -0.2));
      h = std::min(h * fac, opt.h_max);
    } else {
      if (stats) ++stats->rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      if (h < 1e-14 * std::max(1.0, std::abs(t))) throw NumericalError("ode: step size underflow");
    }
  }
  return t;
}

template <class Vec, class Rhs>
double dopri45(Rhs&& f, Vec& y, double t0, double t1, const OdeOptions& opt, OdeStats* stats = nullptr) {
  return dopri45(std::forward<Rhs>(f), y, t0, t1, opt, [](double, const Vec&) { return true; }, stats);
}

}  // namespace loggas
