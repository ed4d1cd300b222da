#include "loggas/density.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

namespace loggas {

namespace {
constexpr double kPi = std::numbers::pi;

double gk(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14, &err);
}
}  // namespace

cplx sqrt_cut(cplx z, double a) { return std::sqrt(z - a) * std::sqrt(z + a); }

cplx Density::stieltjes_d2(cplx z) const {
  const double h = 1e-5 * std::max(1.0, std::abs(z));
  return (stieltjes_d1(z + h) - stieltjes_d1(z - h)) / (2.0 * h);
}

// x = m − h cos θ maps [0,π] onto the support; the sin θ factor kills
// square-root edges so Gauss–Kronrod converges fast.
double Density::integrate(const std::function<double(double)>& f) const {
  const double m = 0.5 * (lower() + upper()), h = 0.5 * (upper() - lower());
  return gk([&](double th) {
    double x = m - h * std::cos(th);
    return f(x) * rho(x) * h * std::sin(th);
  }, 0.0, kPi);
}

double Density::moment(int k) const {
  return integrate([k](double x) { return std::pow(x, k); });
}

MomentVector Density::moments(int K) const {
  MomentVector mv;
  mv.m.resize(static_cast<size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) mv.m[k] = moment(k);
  mv.m[0] = 1.0;
  return mv;
}

double Density::cdf(double x) const {
  if (x <= lower()) return 0.0;
  if (x >= upper()) return 1.0;
  const double m = 0.5 * (lower() + upper()), h = 0.5 * (upper() - lower());
  double thx = std::acos(std::clamp((m - x) / h, -1.0, 1.0));
  return gk([&](double th) {
    double y = m - h * std::cos(th);
    return rho(y) * h * std::sin(th);
  }, 0.0, thx);
}

double Density::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile level must be in (0,1)");
  std::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve([&](double x) { return cdf(x) - u; }, lower(), upper(),
                                             -u, 1.0 - u, boost::math::tools::eps_tolerance<double>(50),
                                             iters);
  return 0.5 * (r.first + r.second);
}

SemicircleDensity::SemicircleDensity(double radius) : r_(radius) {
  if (!(radius > 0.0)) throw ConfigError("semicircle radius must be > 0");
}

double SemicircleDensity::rho(double x) const {
  if (std::abs(x) >= r_) return 0.0;
  return 2.0 / (kPi * r_ * r_) * std::sqrt(r_ * r_ - x * x);
}

cplx SemicircleDensity::stieltjes(cplx z) const { return 2.0 / (r_ * r_) * (-z + sqrt_cut(z, r_)); }

cplx SemicircleDensity::stieltjes_d1(cplx z) const {
  return 2.0 / (r_ * r_) * (-1.0 + z / sqrt_cut(z, r_));
}

cplx SemicircleDensity::stieltjes_d2(cplx z) const {
  cplx s = sqrt_cut(z, r_);
  return -2.0 / (s * s * s);
}

double SemicircleDensity::moment(int k) const {
  if (k % 2) return 0.0;
  const int j = k / 2;
  // Catalan number times (R/2)^{2j}
  double cat = 1.0;
  for (int i = 0; i < j; ++i) cat = cat * 2.0 * (2 * i + 1) / (i + 2);
  return cat * std::pow(0.5 * r_, k);
}

double SemicircleDensity::cdf(double x) const {
  if (x <= -r_) return 0.0;
  if (x >= r_) return 1.0;
  return 0.5 + (x * std::sqrt(r_ * r_ - x * x) + r_ * r_ * std::asin(x / r_)) / (kPi * r_ * r_);
}

double quartic_half_width(double c, double beta) {
  return std::sqrt(2.0 / 3.0 * (-c + std::sqrt(c * c + 3.0 * beta)));
}

QuarticEquilibrium::QuarticEquilibrium(double c, double beta) : c_(c), beta_(beta) {
  if (c < 0.0) throw ConfigError("quartic equilibrium needs c >= 0");
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  a_ = quartic_half_width(c, beta);
}

double QuarticEquilibrium::rho(double x) const {
  if (std::abs(x) >= a_) return 0.0;
  return 2.0 / (beta_ * kPi) * (x * x + 0.5 * a_ * a_ + c_) * std::sqrt(a_ * a_ - x * x);
}

cplx QuarticEquilibrium::stieltjes(cplx z) const {
  const double a = 0.5 * a_ * a_ + c_;
  return 2.0 / beta_ * (-(z * z * z + c_ * z) + (z * z + a) * sqrt_cut(z, a_));
}

cplx QuarticEquilibrium::stieltjes_d1(cplx z) const {
  const double a = 0.5 * a_ * a_ + c_;
  cplx s = sqrt_cut(z, a_);
  return 2.0 / beta_ * (-(3.0 * z * z + c_) + 2.0 * z * s + (z * z + a) * z / s);
}

cplx QuarticEquilibrium::stieltjes_d2(cplx z) const {
  const double a = 0.5 * a_ * a_ + c_;
  cplx s = sqrt_cut(z, a_);
  cplx z2 = z * z;
  return 2.0 / beta_ *
         (-6.0 * z + 2.0 * s + 2.0 * z2 / s + (3.0 * z2 + a) / s - (z2 + a) * z2 / (s * s * s));
}

TabulatedDensity::TabulatedDensity(std::vector<double> xs, std::vector<double> rho)
    : xs_(std::move(xs)), rho_(std::move(rho)) {
  if (xs_.size() != rho_.size() || xs_.size() < 3) throw ConfigError("tabulated density: bad sizes");
  for (size_t i = 1; i < xs_.size(); ++i)
    if (!(xs_[i] > xs_[i - 1])) throw ConfigError("tabulated density: grid must increase");
  double mass = 0.0;
  for (size_t i = 1; i < xs_.size(); ++i) mass += 0.5 * (rho_[i] + rho_[i - 1]) * (xs_[i] - xs_[i - 1]);
  if (!(mass > 0.0)) throw ConfigError("tabulated density: zero mass");
  for (double& r : rho_) {
    if (r < 0.0) throw ConfigError("tabulated density: negative value");
    r /= mass;
  }
}

double TabulatedDensity::rho(double x) const {
  if (x <= xs_.front() || x >= xs_.back()) return 0.0;
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  size_t i = static_cast<size_t>(it - xs_.begin());
  double w = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return (1.0 - w) * rho_[i - 1] + w * rho_[i];
}

cplx TabulatedDensity::stieltjes(cplx z) const {
  cplx s = 0.0;
  for (size_t i = 1; i < xs_.size(); ++i) {
    double h = xs_[i] - xs_[i - 1];
    s += 0.5 * h * (rho_[i - 1] / (xs_[i - 1] - z) + rho_[i] / (xs_[i] - z));
  }
  return s;
}

cplx TabulatedDensity::stieltjes_d1(cplx z) const {
  cplx s = 0.0;
  for (size_t i = 1; i < xs_.size(); ++i) {
    double h = xs_[i] - xs_[i - 1];
    cplx d0 = xs_[i - 1] - z, d1 = xs_[i] - z;
    s += 0.5 * h * (rho_[i - 1] / (d0 * d0) + rho_[i] / (d1 * d1));
  }
  return s;
}

double TabulatedDensity::moment(int k) const {
  double s = 0.0;
  for (size_t i = 1; i < xs_.size(); ++i)
    s += 0.5 * (xs_[i] - xs_[i - 1]) * (rho_[i - 1] * std::pow(xs_[i - 1], k) + rho_[i] * std::pow(xs_[i], k));
  return s;
}

double TabulatedDensity::cdf(double x) const {
  double s = 0.0;
  for (size_t i = 1; i < xs_.size(); ++i) {
    if (xs_[i - 1] >= x) break;
    double hi = std::min(x, xs_[i]);
    s += 0.5 * (hi - xs_[i - 1]) * (rho_[i - 1] + rho(hi));
  }
  return std::clamp(s, 0.0, 1.0);
}

std::shared_ptr<const Density> equilibrium_density(const Potential& p, double beta) {
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (p.is_harmonic()) return std::make_shared<SemicircleDensity>(std::sqrt(beta / p.harmonic_kappa()));
  if (auto c = p.quartic_c()) return std::make_shared<QuarticEquilibrium>(*c, beta);
  throw ConfigError("no closed-form equilibrium for " + p.to_string() +
                    "; supply a tabulated density and use the numeric path");
}

}  // namespace loggas
