#include "loggas/potential.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace loggas {

cplx horner(std::span<const double> c, cplx z) {
  cplx acc = 0.0;
  for (size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
  return acc;
}

double horner(std::span<const double> c, double x) {
  double acc = 0.0;
  for (size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

std::vector<double> poly_derivative(std::span<const double> c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (size_t k = 1; k < c.size(); ++k) d[k - 1] = static_cast<double>(k) * c[k];
  return d;
}

Potential::Potential(std::vector<double> coeffs, double alpha, double check_radius)
    : coeffs_(std::move(coeffs)), alpha_(alpha) {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  for (double c : coeffs_)
    if (!std::isfinite(c)) throw ConfigError("potential coefficients must be finite");
  const int d = degree();
  if (d < 2 || d % 2 != 0) throw ConfigError("potential degree must be even and >= 2");
  if (coeffs_.back() <= 0.0) throw ConfigError("potential leading coefficient must be > 0");
  if (!(alpha_ >= 0.0)) throw ConfigError("alpha must be >= 0");
  dcoeffs_ = poly_derivative(coeffs_);
  derivs_[0] = coeffs_;
  for (int k = 1; k < 4; ++k) derivs_[k] = poly_derivative(derivs_[k - 1]);

  auto d2 = poly_derivative(dcoeffs_);
  const int npts = 10000;
  double vmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < npts; ++i) {
    double x = -check_radius + 2.0 * check_radius * i / (npts - 1);
    vmin = std::min(vmin, horner(d2, x));
  }
  if (alpha_ > vmin + 1e-12) {
    std::ostringstream os;
    os << "alpha=" << alpha_ << " exceeds sampled min V''=" << vmin;
    throw ConfigError(os.str());
  }
}

Potential Potential::harmonic(double kappa) { return Potential({0.0, 0.0, 0.5 * kappa}, kappa); }

Potential Potential::quartic(double c) {
  if (c < 0.0) throw ConfigError("quartic family needs c >= 0");
  return Potential({0.0, 0.0, 0.5 * c, 0.0, 0.25}, c);
}

cplx Potential::eval(cplx z, int order) const {
  if (order < 0 || order > 3) throw std::invalid_argument("derivative order must be in 0..3");
  return horner(derivs_[order], z);
}

double Potential::eval(double x, int order) const {
  if (order < 0 || order > 3) throw std::invalid_argument("derivative order must be in 0..3");
  return horner(derivs_[order], x);
}

bool Potential::is_harmonic() const { return degree() == 2 && coeffs_[1] == 0.0; }

double Potential::harmonic_kappa() const { return 2.0 * coeffs_[2]; }

std::optional<double> Potential::quartic_c() const {
  if (degree() != 4 || coeffs_[1] != 0.0 || coeffs_[3] != 0.0 || coeffs_[4] != 0.25) return std::nullopt;
  return 2.0 * coeffs_[2];
}

std::string Potential::to_string() const {
  std::ostringstream os;
  os << std::setprecision(17) << "V(x) =";
  bool first = true;
  for (size_t k = 0; k < coeffs_.size(); ++k) {
    if (coeffs_[k] == 0.0) continue;
    os << (first ? " " : " + ") << coeffs_[k];
    if (k >= 1) os << " x";
    if (k >= 2) os << "^" << k;
    first = false;
  }
  if (first) os << " 0";
  return os.str();
}

cplx eval_derivatives(const Potential& p, cplx z, int order) { return p.eval(z, order); }

void MomentVector::validate(double tol) const {
  if (m.empty() || std::abs(m[0] - 1.0) > tol) throw NumericalError("moment vector: m0 != 1");
  for (size_t k = 0; k < m.size(); k += 2)
    if (m[k] < -tol) throw NumericalError("moment vector: negative even moment m" + std::to_string(k));
  for (double v : m)
    if (!std::isfinite(v)) throw NumericalError("moment vector: non-finite entry");
}

std::vector<double> t_polynomial(const Potential& p, const MomentVector& m) {
  const auto& a = p.dcoeffs();
  const int dv = static_cast<int>(a.size()) - 1;  // deg V' = 2n-1
  if (m.order() < dv - 1) throw ConfigError("moment order below 2n-2");
  std::vector<double> t(static_cast<size_t>(std::max(dv, 1)), 0.0);
  for (int k = 0; k < dv; ++k) {
    double s = 0.0;
    for (int j = k + 1; j <= dv; ++j) s += a[j] * m[j - 1 - k];
    t[k] = s;
  }
  return t;
}

}  // namespace loggas
