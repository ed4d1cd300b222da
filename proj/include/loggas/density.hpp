#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "loggas/potential.hpp"

namespace loggas {

// One-cut probability density with its Stieltjes transform U(z) = ∫ρ(x)/(x−z)dx.
// U is evaluated on C minus the support; on the support with Im z = +0 it
// returns the upper boundary value.
class Density {
 public:
  virtual ~Density() = default;

  virtual double lower() const = 0;
  virtual double upper() const = 0;
  virtual double rho(double x) const = 0;
  virtual cplx stieltjes(cplx z) const = 0;
  virtual cplx stieltjes_d1(cplx z) const = 0;
  virtual cplx stieltjes_d2(cplx z) const;
  // true when stieltjes() is the exact analytic continuation off the support
  virtual bool analytic() const { return true; }

  virtual double moment(int k) const;
  MomentVector moments(int K) const;
  virtual double cdf(double x) const;
  double quantile(double u) const;
  double integrate(const std::function<double(double)>& f) const;
};

// ρ(x) = 2/(πR²)·√(R²−x²)
class SemicircleDensity : public Density {
 public:
  explicit SemicircleDensity(double radius);
  double radius() const { return r_; }
  double lower() const override { return -r_; }
  double upper() const override { return r_; }
  double rho(double x) const override;
  cplx stieltjes(cplx z) const override;
  cplx stieltjes_d1(cplx z) const override;
  cplx stieltjes_d2(cplx z) const override;
  double moment(int k) const override;
  double cdf(double x) const override;

 private:
  double r_;
};

// Equilibrium of V = x⁴/4 + c x²/2 at inverse temperature β.
class QuarticEquilibrium : public Density {
 public:
  QuarticEquilibrium(double c, double beta);
  double half_width() const { return a_; }
  double c() const { return c_; }
  double beta() const { return beta_; }
  double lower() const override { return -a_; }
  double upper() const override { return a_; }
  double rho(double x) const override;
  cplx stieltjes(cplx z) const override;
  cplx stieltjes_d1(cplx z) const override;
  cplx stieltjes_d2(cplx z) const override;

 private:
  double c_, beta_, a_;
};

// Grid samples; the transform is a trapezoid sum, so it is only trustworthy
// a few grid spacings away from the axis.
class TabulatedDensity : public Density {
 public:
  TabulatedDensity(std::vector<double> xs, std::vector<double> rho);
  double lower() const override { return xs_.front(); }
  double upper() const override { return xs_.back(); }
  double rho(double x) const override;
  cplx stieltjes(cplx z) const override;
  cplx stieltjes_d1(cplx z) const override;
  bool analytic() const override { return false; }
  double moment(int k) const override;
  double cdf(double x) const override;
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& values() const { return rho_; }

 private:
  std::vector<double> xs_, rho_;
};

// √(z−A)·√(z+A) with principal roots; cut on [−A,A], ~z at infinity.
cplx sqrt_cut(cplx z, double a);

// Support half-width of the quartic equilibrium, normalized to unit mass.
double quartic_half_width(double c, double beta);

// Closed-form equilibrium for harmonic or quartic V; other families throw ConfigError.
std::shared_ptr<const Density> equilibrium_density(const Potential& p, double beta);

}  // namespace loggas
