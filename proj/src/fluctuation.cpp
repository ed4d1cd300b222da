#include "loggas/fluctuation.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "loggas/transforms.hpp"

namespace loggas {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

double angle_of(double x, double a) {
  if (!(std::abs(x) < a)) throw ConfigError("off-support arguments");
  return std::acos(x / a);
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << std::setprecision(17);
  return out;
}
}  // namespace

cplx lambda_angles(double dt, cplx theta1, cplx theta2, int s1, int s2) {
  if (dt < 0.0) throw ConfigError("dt ≥ 0 required");
  const cplx a = double(s1) * theta1, b = double(s2) * theta2;
  const cplx den = 2.0 * std::sin(a) * std::sin(b);
  if (std::abs(den) == 0.0) throw NumericalError("edge singularity");
  const cplx w = std::exp(cplx(0.0, -1.0) * (a + b) - dt);
  if (std::abs(w - 1.0) < 1e-300) throw NumericalError("on-diagonal distribution");
  return -w / ((w - 1.0) * (w - 1.0) * den);
}

cplx hermite_lambda(double dt, double theta1, double theta2, int s1, int s2) {
  if (!(theta1 > 0.0 && theta1 < kPi && theta2 > 0.0 && theta2 < kPi)) throw NumericalError("edge singularity");
  if (dt == 0.0 && theta1 == theta2 && s1 != s2) throw NumericalError("on-diagonal distribution");
  return lambda_angles(dt, theta1, theta2, s1, s2);
}

double combine_signed(cplx gpp, cplx gpm) { return -(gpp - gpm).real() / (2.0 * kPi * kPi); }

double hermite_gtilde(double dt, double theta1, double theta2) {
  const cplx i(0.0, 1.0);
  const cplx a = std::sin((theta1 - theta2 + i * dt) / 2.0);
  const cplx b = std::sin((theta1 + theta2 + i * dt) / 2.0);
  return -(1.0 / (a * a) + 1.0 / (b * b)).real() / (8.0 * kPi * kPi);
}

double hermite_gtilde_minus(double dt, double phi) {
  const cplx a = std::sin((phi + cplx(0.0, dt)) / 2.0);
  return -(1.0 / (a * a)).real() / (8.0 * kPi * kPi);
}

double hermite_g(double dt, double x1, double x2) {
  if (dt < 0.0) throw ConfigError("dt ≥ 0 required");
  const double th1 = angle_of(x1, kSqrt2), th2 = angle_of(x2, kSqrt2);
  if (dt == 0.0 && x1 == x2) throw ConfigError("on-diagonal distribution");
  return hermite_gtilde(dt, th1, th2) / (2.0 * std::sin(th1) * std::sin(th2));
}

double hermite_equal_time(double x1, double x2) {
  if (!(std::abs(x1) < kSqrt2 && std::abs(x2) < kSqrt2)) throw ConfigError("off-support arguments");
  if (x1 == x2) throw ConfigError("on-diagonal distribution");
  const double d = x2 - x1;
  return -(2.0 - x1 * x2) / (std::sqrt((2.0 - x1 * x1) * (2.0 - x2 * x2)) * d * d) / (2.0 * kPi * kPi);
}

SignedKernel johansson_equal_time(double x1, double x2, double A, double beta) {
  if (!(A > 0.0)) throw ConfigError("support half-width must be positive");
  const double th1 = angle_of(x1, A), th2 = angle_of(x2, A);
  if (x1 == x2) throw ConfigError("on-diagonal distribution");
  const double pref = (2.0 / beta) * (2.0 / (A * A));
  SignedKernel k;
  k.pp = pref * lambda_angles(0.0, th1, th2, 1, 1);
  k.pm = pref * lambda_angles(0.0, th1, th2, 1, -1);
  k.real = combine_signed(k.pp, k.pm);
  return k;
}

std::function<cplx(cplx)> johansson_slice(double x2, double A, double beta, int s) {
  const double th2 = angle_of(x2, A);
  const double pref = (2.0 / beta) * (2.0 / (A * A));
  return [=](cplx z) { return pref * lambda_angles(0.0, std::acos(z / A), th2, 1, s); };
}

const char* to_string(KernelMethod m) {
  switch (m) {
    case KernelMethod::ClosedForm: return "closed_form";
    case KernelMethod::GMap: return "g_map";
    case KernelMethod::PdeCharacteristics: return "pde_characteristics";
  }
  return "?";
}

KernelValue conjugate_slot(const KernelValue& k) {
  KernelValue out = k;
  out.eps1 = -k.eps1;
  out.value = std::conj(k.value);
  return out;
}

void write_kernel_csv(const std::string& path, const std::vector<KernelValue>& ks) {
  auto out = open_csv(path);
  out << "t1,x1,t2,x2,eps1,eps2,re,im,method\n";
  for (const auto& k : ks)
    out << k.t1 << ',' << k.x1 << ',' << k.t2 << ',' << k.x2 << ',' << (k.eps1 > 0 ? '+' : '-') << ','
        << (k.eps2 > 0 ? '+' : '-') << ',' << k.value.real() << ',' << k.value.imag() << ',' << to_string(k.method)
        << '\n';
}

void write_real_kernel_csv(const std::string& path, const std::vector<KernelValue>& ks) {
  auto out = open_csv(path);
  out << "t1,x1,t2,x2,g\n";
  for (const auto& k : ks) {
    if (!k.real_kernel) continue;
    out << k.t1 << ',' << k.x1 << ',' << k.t2 << ',' << k.x2 << ',' << *k.real_kernel << '\n';
  }
}

double short_distance(double x, double rho_at_x, double dx, double dt, double eps) {
  (void)x;
  if (dx == 0.0 && dt == 0.0) throw ConfigError("short_distance: δx = δt = 0");
  if (!(eps > 0.0)) throw ConfigError("short_distance: eps must be positive");
  const cplx w(dx, kPi * rho_at_x * dt);
  return -(1.0 / (w * w)).real() / (2.0 * kPi * kPi * eps * eps);
}

cplx short_distance_signed(double x, double rho_at_x, double dx, double dt, double eps) {
  (void)x;
  if (dx == 0.0 && dt == 0.0) throw ConfigError("short_distance: δx = δt = 0");
  if (!(eps > 0.0)) throw ConfigError("short_distance: eps must be positive");
  const cplx w(dx, kPi * rho_at_x * dt);
  return -1.0 / (w * w) / (4.0 * kPi * kPi * eps * eps);
}

namespace {
std::vector<double> angle_samples(const AngleKernel& k, double dt, int M) {
  std::vector<double> v(static_cast<size_t>(M));
  for (int j = 0; j < M; ++j) v[static_cast<size_t>(j)] = k(dt, 2.0 * kPi * j / M);
  return v;
}
}  // namespace

double fluct_operator_residual(const AngleKernel& k, double dt, int M) {
  if (M < 8 || M % 2) throw ConfigError("angle grid needs an even number of points ≥ 8");
  const double h = 2.0 * kPi / M;
  if (dt - h < 0.0) throw ConfigError("dt must exceed the angle spacing");
  const int nmax = M / 2 - 1;
  const auto f0 = angle_samples(k, dt, M);
  PeriodicCoefficients c = periodic_coefficients(f0, nmax);
  double head = 0.0, tail = 0.0;
  for (int n = 0; n <= nmax; ++n) {
    double& slot = n < 3 * nmax / 4 ? head : tail;
    slot = std::max(slot, std::abs(c[n]));
  }
  if (head > 0.0 && tail > 1e-6 * head) throw NumericalError("grid too coarse");
  for (int n = -nmax; n <= nmax; ++n) c[n] *= std::abs(n);
  const auto dHk = periodic_samples(c, M);
  const auto fp = angle_samples(k, dt + h, M), fm = angle_samples(k, dt - h, M);
  double res = 0.0;
  for (size_t j = 0; j < f0.size(); ++j) res = std::max(res, std::abs((fp[j] - fm[j]) / (2.0 * h) + dHk[j]));
  return res;
}

std::vector<double> mode_decay_rates(const AngleKernel& k, double dt, int M, int nmax) {
  const double h = 1e-3;
  auto logc = [&](double t) {
    auto c = periodic_coefficients(angle_samples(k, t, M), nmax);
    std::vector<double> out(static_cast<size_t>(nmax + 1));
    for (int n = 1; n <= nmax; ++n) {
      if (std::abs(c[n]) == 0.0) throw NumericalError("mode " + std::to_string(n) + " vanishes");
      out[static_cast<size_t>(n)] = std::log(std::abs(c[n]));
    }
    return out;
  };
  std::vector<double> rates(static_cast<size_t>(nmax));
  if (dt >= h) {
    auto lp = logc(dt + h), lm = logc(dt - h);
    for (int n = 1; n <= nmax; ++n) rates[n - 1] = -(lp[n] - lm[n]) / (2.0 * h);
  } else {
    auto l0 = logc(dt), l1 = logc(dt + h), l2 = logc(dt + 2 * h);
    for (int n = 1; n <= nmax; ++n) rates[n - 1] = -(-3.0 * l0[n] + 4.0 * l1[n] - l2[n]) / (2.0 * h);
  }
  return rates;
}

double kernel_pairing(const std::function<double(double, double)>& K, const std::function<double(double)>& f,
                      const std::function<double(double)>& h, double A) {
  using boost::math::quadrature::gauss;
  // 64 and 65 point rules share no nodes, so x1 ≠ x2 throughout
  auto outer = [&](double p1) {
    const double x1 = A * std::cos(p1), f1 = f(x1), h1 = h(x1);
    auto inner = [&](double p2) {
      const double x2 = A * std::cos(p2);
      return (f1 - f(x2)) * (h1 - h(x2)) * K(x1, x2) * std::sin(p2);
    };
    return gauss<double, 65>::integrate(inner, 0.0, kPi) * std::sin(p1);
  };
  return -0.5 * A * A * gauss<double, 64>::integrate(outer, 0.0, kPi);
}

std::vector<MeanPoint> mean_evolution(const UField& field, const Potential& p, double beta, cplx z0, double t0,
                                      double t1, cplx mean0, const OdeOptions& opt) {
  if (!(z0.imag() > 0.0)) throw ConfigError("mean_evolution: z must lie in the upper half-plane");
  if (t1 < t0) throw ConfigError("mean_evolution: t1 < t0");
  using Vec = Eigen::Matrix<cplx, 2, 1>;
  const double src = 0.5 * (1.0 - 0.5 * beta);
  auto rhs = [&](double t, const Vec& y) {
    const cplx z = y[0];
    const cplx v = 0.5 * beta * field.u(t, z) + p.eval(z, 1);
    const cplx dv = 0.5 * beta * field.du(t, z) + p.eval(z, 2);
    Vec d;
    d[0] = -v;
    d[1] = dv * y[1] + (src != 0.0 ? src * field.d2u(t, z) : cplx(0.0));
    return d;
  };
  std::vector<MeanPoint> path{{t0, z0, mean0}};
  Vec y(z0, mean0);
  auto obs = [&](double t, const Vec& v) {
    if (v[0].imag() < 0.0) throw NumericalError("characteristic crossed the real axis");
    path.push_back({t, v[0], v[1]});
    return true;
  };
  dopri45(rhs, y, t0, t1, opt, obs);
  return path;
}

}  // namespace loggas
