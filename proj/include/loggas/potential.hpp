#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loggas/errors.hpp"

namespace loggas {

// V(x) = sum_k coeffs[k] x^k, even degree, positive leading coefficient.
class Potential {
 public:
  Potential(std::vector<double> coeffs, double alpha, double check_radius = 10.0);

  static Potential harmonic(double kappa = 1.0);
  // x^4/4 + c x^2/2
  static Potential quartic(double c);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double alpha() const { return alpha_; }
  std::span<const double> coeffs() const { return coeffs_; }
  // coefficients a_j of V'(z) = sum a_j z^j
  const std::vector<double>& dcoeffs() const { return dcoeffs_; }

  cplx eval(cplx z, int order) const;
  double eval(double x, int order) const;

  bool is_harmonic() const;
  double harmonic_kappa() const;
  std::optional<double> quartic_c() const;

  std::string to_string() const;

 private:
  std::vector<double> coeffs_;
  std::vector<double> dcoeffs_;
  std::vector<double> derivs_[4];
  double alpha_;
};

// V^(order)(z), order in 0..3
cplx eval_derivatives(const Potential& p, cplx z, int order);

struct MomentVector {
  std::vector<double> m;

  int order() const { return static_cast<int>(m.size()) - 1; }
  double operator[](int k) const { return m[static_cast<size_t>(k)]; }
  // throws NumericalError when m0 != 1 or an even moment is negative
  void validate(double tol = 1e-10) const;
};

// Coefficients (ascending) of the polynomial T(z) such that
// V'(z)U(z) + T(z) is the analytic part at infinity.
std::vector<double> t_polynomial(const Potential& p, const MomentVector& m);

// Polynomial helpers used all over the place.
cplx horner(std::span<const double> c, cplx z);
double horner(std::span<const double> c, double x);
std::vector<double> poly_derivative(std::span<const double> c);

}  // namespace loggas
