#include "loggas/field.hpp"

#include <cmath>

#include "loggas/hydro.hpp"

namespace loggas {

cplx UField::d2u(double t, cplx z) const {
  const double h = 1e-4 * std::max(1.0, std::abs(z));
  return (du(t, z + h) - du(t, z - h)) / (2.0 * h);
}

double ScalingField::s(double t) const { return scaling_solution(s0_, t); }

namespace {
const double kR = std::sqrt(2.0);
}

cplx ScalingField::u(double t, cplx z) const {
  double sc = s(t);
  cplx w = z / sc;
  return (-w + sqrt_cut(w, kR)) / sc;
}

cplx ScalingField::du(double t, cplx z) const {
  double sc = s(t);
  cplx w = z / sc;
  return (-1.0 + w / sqrt_cut(w, kR)) / (sc * sc);
}

cplx ScalingField::d2u(double t, cplx z) const {
  double sc = s(t);
  cplx q = sqrt_cut(z / sc, kR);
  return -2.0 / (q * q * q) / (sc * sc * sc);
}

std::shared_ptr<const Density> ScalingField::density_at(double t) const {
  return std::make_shared<SemicircleDensity>(kR * s(t));
}

}  // namespace loggas
