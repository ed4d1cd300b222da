#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "loggas/errors.hpp"

namespace loggas {

struct GridFunction {
  std::vector<double> xs;
  std::vector<double> values;
  bool mean_removed = false;

  double spacing() const;
  // throws ConfigError unless strictly increasing with uniform spacing
  void check_uniform(double rel_tol = 1e-9) const;
};

// Fourier coefficients c_n, n = -nmax..nmax, stored at index n + nmax.
struct PeriodicCoefficients {
  int nmax = 0;
  std::vector<cplx> c;

  static PeriodicCoefficients zeros(int nmax);
  cplx& operator[](int n) { return c[static_cast<size_t>(n + nmax)]; }
  cplx operator[](int n) const { return c[static_cast<size_t>(n + nmax)]; }
  cplx eval(double theta) const;
};

// ∫φ(x)/(x−z)dx by the trapezoid rule on the grid.
cplx stieltjes(const GridFunction& phi, cplx z);

struct HilbertOptions {
  int pad_factor = 4;
  // cosine taper over this fraction of the grid at each end (0 = off)
  double taper = 0.0;
  // terms of the cot expansion used to undo periodization of the padded FFT
  int correction_terms = 6;
};

// (1/π) p.v.∫ f(y)/(x−y) dy
GridFunction hilbert_line(const GridFunction& f, const HilbertOptions& opt = {});

// Coefficients of M equispaced periodic samples on [0, 2π): c_n = (1/M)Σ f_j e^{−inθ_j}, |n| ≤ nmax < M/2.
PeriodicCoefficients periodic_coefficients(const std::vector<double>& samples, int nmax);
// Samples of Σ c_n e^{inθ} at θ_j = 2πj/M.
std::vector<double> periodic_samples(const PeriodicCoefficients& c, int M);

// c_n ↦ −i sgn(n) c_n
PeriodicCoefficients hilbert_periodic(const PeriodicCoefficients& c);

struct PlemeljValue {
  double rho = 0.0;
  bool near_edge = false;
};

// Im u/π of a boundary value.
double plemelj_density(cplx u_plus);

// u(eps) ≈ U(x+i eps); Richardson on eps, eps/2.
PlemeljValue plemelj_density(const std::function<cplx(double)>& u_eps, double eps,
                             std::optional<std::pair<double, double>> edges = std::nullopt,
                             double x = 0.0);

void write_grid_csv(const std::string& path, const GridFunction& f);
GridFunction read_grid_csv(const std::string& path);
void write_periodic_csv(const std::string& path, const PeriodicCoefficients& c);
PeriodicCoefficients read_periodic_csv(const std::string& path);

}  // namespace loggas
