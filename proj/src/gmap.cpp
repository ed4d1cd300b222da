#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "loggas/fluctuation.hpp"
#include "loggas/ode.hpp"

namespace loggas {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEdgeGap = 1e-6;

using boost::math::quadrature::gauss_kronrod;
}  // namespace

GMap GMap::build(std::shared_ptr<const Density> eq, std::shared_ptr<const Potential> p, double beta) {
  if (!eq || !p) throw ConfigError("GMap: density and potential required");
  if (!(beta > 0.0)) throw ConfigError("GMap: beta must be positive");
  const double a = eq->upper();
  if (std::abs(eq->lower() + a) > 1e-12 * a) throw ConfigError("GMap: symmetric one-cut density required");
  for (int j = 1; j < 400; ++j) {
    const double x = a * (-1.0 + 2.0 * j / 400.0);
    if (!(eq->rho(x) > 0.0)) throw ConfigError("GMap: density vanishing in interior");
  }
  GMap g;
  g.eq_ = std::move(eq);
  g.p_ = std::move(p);
  g.beta_ = beta;
  g.a_ = a;
  return g;
}

double GMap::G(double x) const {
  if (!(std::abs(x) < a_)) throw ConfigError("GMap: x outside the open support");
  if (x == 0.0) return 0.0;
  auto f = [&](double y) { return 1.0 / eq_->rho(y); };
  return (2.0 / beta_) * gauss_kronrod<double, 61>::integrate(f, 0.0, x, 15, 1e-14);
}

cplx GMap::rho_c(cplx z, int side) const {
  int s = z.imag() > 0.0 ? 1 : z.imag() < 0.0 ? -1 : side;
  cplx u;
  if (s > 0) {
    u = eq_->stieltjes(cplx(z.real(), std::abs(z.imag())));
  } else {
    u = std::conj(eq_->stieltjes(cplx(z.real(), std::abs(z.imag()))));
  }
  return (u + (2.0 / beta_) * p_->eval(z, 1)) / cplx(0.0, kPi * s);
}

cplx GMap::dG(cplx z) const { return (2.0 / beta_) / rho_c(z); }

cplx GMap::G(cplx z, cplx w0) const {
  const cplx d = z - w0;
  if (d == 0.0) return 0.0;
  // side of the segment decides the boundary value for points on the axis
  const int side = d.imag() < 0.0 || (d.imag() == 0.0 && w0.imag() < 0.0) ? -1 : 1;
  auto f = [&](double s) { return (2.0 / beta_) / rho_c(w0 + s * d, side) * d; };
  return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
}

FlowResult continuation_flow(const GMap& g, double x1, double t, int direction) {
  const double a = g.half_width();
  if (!(std::abs(x1) < a)) throw ConfigError("continuation_flow: x1 outside the open support");
  if (t < 0.0) throw ConfigError("continuation_flow: t ≥ 0 required");
  if (direction != 1 && direction != -1) throw ConfigError("continuation_flow: direction must be ±1");
  FlowResult r{cplx(x1, 0.0), 0.0, a - std::abs(x1)};
  if (t == 0.0) return r;

  using Vec = Eigen::Matrix<cplx, 1, 1>;
  const double half_beta = 0.5 * g.beta();
  auto rhs = [&](double, const Vec& y) {
    Vec d;
    d[0] = cplx(0.0, kPi * direction) * half_beta * g.rho_c(y[0], direction);
    return d;
  };
  auto obs = [&](double, const Vec& y) {
    const double gap = std::min(std::abs(y[0] - a), std::abs(y[0] + a));
    r.min_edge_distance = std::min(r.min_edge_distance, gap);
    if (gap < kEdgeGap) throw NumericalError("edge collision");
    return true;
  };
  Vec y;
  y[0] = cplx(x1, 0.0);
  OdeOptions opt{1e-13, 1e-12};
  dopri45(rhs, y, 0.0, t, opt, obs);
  r.z = y[0];
  r.residual = std::abs(g.G(r.z, cplx(x1, 0.0)) - cplx(0.0, kPi * direction * t));
  return r;
}

cplx quartic_flow_closed_form(double A, double c, double x1, double t) {
  if (!(std::abs(x1) < A) || x1 == 0.0) throw ConfigError("quartic closed form: 0 < |x1| < A required");
  if (x1 < 0.0) return -std::conj(quartic_flow_closed_form(A, c, -x1, t));
  const double a2 = A * A;
  const double p = 1.5 * a2 + c, q = 0.5 * a2 + c;
  const double tau = 1.0 / std::sqrt(p * q);
  const double C = std::sqrt(q / p);
  const double th = std::tanh(t / tau);
  const double h1 = std::sqrt(a2 / (x1 * x1) - 1.0);
  const cplx i(0.0, 1.0);
  const cplx num = A * (1.0 + i * C * th * h1);
  const cplx den = (1.0 - C * C * th * th) * a2 / (x1 * x1) + th * th * (C * C - 1.0 / (C * C)) +
                   2.0 * i * (C - 1.0 / C) * th * h1;
  return num / std::sqrt(den);
}

SignedKernel stationary_two_time(const GMap& g, double t1, double t2, double x1, double x2) {
  if (t1 < t2) throw ConfigError("stationary_two_time: t1 ≥ t2 required");
  const double a = g.half_width();
  if (t1 == t2) return johansson_equal_time(x1, x2, a, g.beta());
  const cplx z1 = continuation_flow(g, x1, t1 - t2, +1).z;
  const cplx w = g.rho_c(z1) / g.density().rho(x1);
  SignedKernel k;
  k.pp = w * johansson_slice(x2, a, g.beta(), +1)(z1);
  k.pm = w * johansson_slice(x2, a, g.beta(), -1)(z1);
  k.real = combine_signed(k.pp, k.pm);
  return k;
}

double stationary_two_time_g(const GMap& g, double t1, double t2, double x1, double x2, StationaryForm form) {
  if (t1 < t2) return stationary_two_time_g(g, t2, t1, x2, x1, form);
  if (form == StationaryForm::Theorem || t1 == t2) return stationary_two_time(g, t1, t2, x1, x2).real;

  const double a = g.half_width(), half = 0.5 * (t1 - t2);
  const cplx z1 = continuation_flow(g, x1, half, +1).z;
  const cplx z2p = continuation_flow(g, x2, half, +1).z;
  const cplx z2m = continuation_flow(g, x2, half, -1).z;
  const cplx th1 = std::acos(z1 / a), th2p = std::acos(z2p / a), th2m = std::acos(z2m / a);
  const double pref = (2.0 / g.beta()) * (2.0 / (a * a));
  auto K = [&](cplx u, cplx v, int s) {
    const cplx h = std::sin((u + double(s) * v) / 2.0);
    return pref / (8.0 * std::sin(u) * std::sin(v) * h * h);
  };
  const cplx r1 = g.rho_c(z1);
  const cplx sum = r1 * g.rho_c(z2p) * K(th1, th2p, +1) + r1 * g.rho_c(z2m, -1) * K(th1, th2m, -1);
  const double rho12 = g.density().rho(x1) * g.density().rho(x2);
  return -sum.real() / (2.0 * kPi * kPi * rho12);
}

}  // namespace loggas
