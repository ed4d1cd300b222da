#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "doctest.h"
#include "loggas/fluctuation.hpp"

using namespace loggas;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

std::shared_ptr<const Potential> harmonic() { return std::make_shared<Potential>(Potential::harmonic(1.0)); }
std::shared_ptr<const SemicircleDensity> hermite_eq() { return std::make_shared<SemicircleDensity>(sqrt2); }

// −(1/8π²) Re[sin⁻²((θ1−θ2+iΔt)/2) + sin⁻²((θ1+θ2+iΔt)/2)] / (2 sinθ1 sinθ2), written out independently
double g_oracle(double dt, double x1, double x2) {
  const double t1 = std::acos(x1 / sqrt2), t2 = std::acos(x2 / sqrt2);
  auto s2 = [&](double a) {
    cplx s = std::sin(cplx(a, dt) / 2.0);
    return (1.0 / (s * s)).real();
  };
  return -(s2(t1 - t2) + s2(t1 + t2)) / (8 * pi * pi) / (2 * std::sin(t1) * std::sin(t2));
}

}  // namespace

TEST_CASE("Hermite Lambda and g at the worked point") {
  // θ1 = π/2, θ2 = π/3: Λ⁺⁺ = 1/(4√3 sin²(5π/12)), g = −2/(√3π²)
  cplx lam = hermite_lambda(0.0, pi / 2, pi / 3, 1, 1);
  CHECK(lam.real() == doctest::Approx(1.0 / (4 * std::sqrt(3.0) * std::pow(std::sin(5 * pi / 12), 2))).epsilon(1e-14));
  CHECK(std::abs(lam.imag()) < 1e-14);
  CHECK(hermite_g(0.0, 0.0, sqrt2 / 2) == doctest::Approx(-2 / (std::sqrt(3.0) * pi * pi)).epsilon(1e-13));
  CHECK(hermite_equal_time(0.0, sqrt2 / 2) == doctest::Approx(-2 / (std::sqrt(3.0) * pi * pi)).epsilon(1e-13));
}

TEST_CASE("Hermite kernel: oracle, symmetry, conjugation, decorrelation") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-1.35, 1.35), ut(0.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    const double x1 = ux(rng), x2 = ux(rng), dt = ut(rng);
    const double g = hermite_g(dt, x1, x2);
    CHECK(g == doctest::Approx(g_oracle(dt, x1, x2)).epsilon(1e-11));
    CHECK(g == doctest::Approx(hermite_g(dt, x2, x1)).epsilon(1e-12));
    const double t1 = std::acos(x1 / sqrt2), t2 = std::acos(x2 / sqrt2);
    CHECK(std::abs(hermite_lambda(dt, t1, t2, -1, -1) - std::conj(hermite_lambda(dt, t1, t2, 1, 1))) < 1e-12);
    CHECK(combine_signed(hermite_lambda(dt, t1, t2, 1, 1), hermite_lambda(dt, t1, t2, 1, -1)) ==
          doctest::Approx(g).epsilon(1e-11));
  }
  CHECK(std::abs(hermite_lambda(30.0, 1.0, 2.0, 1, 1)) < 1e-12);
  CHECK_THROWS_AS(hermite_g(0.0, 0.4, 0.4), ConfigError);
  CHECK_THROWS_AS(hermite_lambda(0.0, 0.0, 1.0, 1, 1), NumericalError);
  CHECK_THROWS_AS(hermite_g(-1.0, 0.1, 0.4), ConfigError);
}

TEST_CASE("Johansson equal-time kernel scales with the support") {
  CHECK(johansson_equal_time(0.2, -0.7, sqrt2, 2.0).real == doctest::Approx(hermite_equal_time(0.2, -0.7)).epsilon(1e-13));
  for (double A : {0.8, 1.9})
    for (double beta : {1.0, 2.0, 4.0}) {
      const double x1 = 0.3 * A, x2 = -0.55 * A;
      const double ref = (2 / beta) * (2 / (A * A)) * hermite_equal_time(sqrt2 * x1 / A, sqrt2 * x2 / A);
      CHECK(johansson_equal_time(x1, x2, A, beta).real == doctest::Approx(ref).epsilon(1e-12));
    }
  CHECK_THROWS_AS(johansson_equal_time(2.0, 0.1, sqrt2, 2.0), ConfigError);
}

TEST_CASE("G-map values") {
  GMap g = GMap::build(hermite_eq(), harmonic(), 2.0);
  CHECK(g.G(0.0) == 0.0);
  // G(x) = π arcsin(x/√2)
  for (double x : {-1.2, 0.3, 1.0}) CHECK(g.G(x) == doctest::Approx(pi * std::asin(x / sqrt2)).epsilon(1e-12));
  CHECK(g.G(1.0) == doctest::Approx(pi * pi / 4).epsilon(1e-13));
  for (double c : {0.0, 1.0}) {
    auto eq = std::make_shared<QuarticEquilibrium>(c, 2.0);
    GMap q = GMap::build(eq, std::make_shared<Potential>(Potential::quartic(c)), 2.0);
    for (double u = -0.95; u < 0.96; u += 0.1) {
      const double x = u * q.half_width();
      CHECK(q.dG(x).real() * eq->rho(x) == doctest::Approx(1.0).epsilon(1e-10));
    }
    // ρ^C continues ρ off the axis from either side
    CHECK(std::abs(q.rho_c(cplx(0.3, 1e-9)) - eq->rho(0.3)) < 1e-7);
    CHECK(std::abs(q.rho_c(cplx(0.3, -1e-9), -1) - eq->rho(0.3)) < 1e-7);
  }
}

TEST_CASE("continuation flow: Hermite angle shift, quartic closed form, conjugate direction") {
  GMap g = GMap::build(hermite_eq(), harmonic(), 2.0);
  for (double x1 : {-0.9, 0.2, 1.1})
    for (double t : {0.0, 0.4, 1.5}) {
      auto f = continuation_flow(g, x1, t);
      CHECK(std::abs(f.z - sqrt2 * std::cos(cplx(std::acos(x1 / sqrt2), -t))) < 1e-9);
      CHECK(f.residual < 1e-8);
      auto b = continuation_flow(g, x1, t, -1);
      CHECK(std::abs(b.z - std::conj(f.z)) < 1e-10);
    }
  auto eq = std::make_shared<QuarticEquilibrium>(0.5, 2.0);
  GMap q = GMap::build(eq, std::make_shared<Potential>(Potential::quartic(0.5)), 2.0);
  const double A = eq->half_width();
  const double tau = 1 / std::sqrt((1.5 * A * A + 0.5) * (0.5 * A * A + 0.5));
  for (double x1 : {-0.6 * A, 0.1 * A, 0.8 * A}) {
    auto f = continuation_flow(q, x1, 0.4 * tau);
    CHECK(std::abs(f.z - quartic_flow_closed_form(A, 0.5, x1, 0.4 * tau)) < 1e-8);
  }
}

TEST_CASE("stationary two-time kernel") {
  GMap g = GMap::build(hermite_eq(), harmonic(), 2.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(-1.2, 1.2), ut(0.05, 1.5);
  for (int k = 0; k < 20; ++k) {
    const double x1 = ux(rng), x2 = ux(rng), dt = ut(rng);
    const double ref = g_oracle(dt, x1, x2);
    CHECK(stationary_two_time_g(g, dt, 0.0, x1, x2) == doctest::Approx(ref).epsilon(1e-8));
    CHECK(stationary_two_time_g(g, dt + 0.7, 0.7, x1, x2) == doctest::Approx(ref).epsilon(1e-8));
    CHECK(stationary_two_time_g(g, dt, 0.0, x1, x2, StationaryForm::SplitTime) == doctest::Approx(ref).epsilon(1e-8));
  }
  auto eq = std::make_shared<QuarticEquilibrium>(0.0, 1.0);
  GMap q = GMap::build(eq, std::make_shared<Potential>(Potential::quartic(0.0)), 1.0);
  const double A = eq->half_width();
  CHECK(stationary_two_time_g(q, 0.3, 0.3, 0.2 * A, -0.5 * A) ==
        doctest::Approx(johansson_equal_time(0.2 * A, -0.5 * A, A, 1.0).real).epsilon(1e-10));
  const double a = stationary_two_time_g(q, 0.25, 0.0, 0.2 * A, -0.5 * A);
  CHECK(stationary_two_time_g(q, 1.25, 1.0, 0.2 * A, -0.5 * A) == doctest::Approx(a).epsilon(1e-10));
  // off Hermite the split form is only first-order accurate in the gap
  auto gap = [&](double t) {
    return std::abs(stationary_two_time_g(q, t, 0.0, 0.2 * A, -0.5 * A, StationaryForm::SplitTime) -
                    stationary_two_time_g(q, t, 0.0, 0.2 * A, -0.5 * A));
  };
  CHECK(gap(0.1) / gap(0.05) == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("kernel PDE transport agrees with the closed forms") {
  PdeKernelProblem pr;
  pr.potential = harmonic();
  pr.beta = 2.0;
  pr.field = std::make_shared<StationaryField>(hermite_eq());
  const std::vector<double> xs{-1.0, -0.3, 0.5, 1.1};
  const double x2 = 0.25;
  pr.initial = johansson_slice(x2, sqrt2, 2.0, +1);
  auto gpp = pde_evolve_kernel(pr, 0.6, xs);
  pr.initial = johansson_slice(x2, sqrt2, 2.0, -1);
  auto gpm = pde_evolve_kernel(pr, 0.6, xs);
  for (size_t i = 0; i < xs.size(); ++i) CHECK(combine_signed(gpp[i], gpm[i]) == doctest::Approx(g_oracle(0.6, xs[i], x2)).epsilon(1e-6));

  // zero data stay zero
  pr.initial = [](cplx) { return cplx(0.0); };
  for (cplx v : pde_evolve_kernel(pr, 0.8, xs)) CHECK(std::abs(v) == 0.0);

  // quartic: PDE against the G-map
  auto eq = std::make_shared<QuarticEquilibrium>(0.4, 2.0);
  auto qp = std::make_shared<Potential>(Potential::quartic(0.4));
  GMap q = GMap::build(eq, qp, 2.0);
  const double A = eq->half_width();
  pr.potential = qp;
  pr.field = std::make_shared<StationaryField>(eq);
  const std::vector<double> qx{-0.6 * A, 0.2 * A, 0.7 * A};
  pr.initial = johansson_slice(-0.1 * A, A, 2.0, +1);
  auto qpp = pde_evolve_kernel(pr, 0.2, qx);
  pr.initial = johansson_slice(-0.1 * A, A, 2.0, -1);
  auto qpm = pde_evolve_kernel(pr, 0.2, qx);
  for (size_t i = 0; i < qx.size(); ++i)
    CHECK(combine_signed(qpp[i], qpm[i]) == doctest::Approx(stationary_two_time_g(q, 0.2, 0.0, qx[i], -0.1 * A)).epsilon(1e-6));
}

TEST_CASE("kernel PDE weak form") {
  PdeKernelProblem pr;
  pr.potential = harmonic();
  pr.beta = 2.0;
  pr.field = std::make_shared<StationaryField>(hermite_eq());
  pr.initial = johansson_slice(0.3, sqrt2, 2.0, +1);
  auto f = [](double x) { return std::exp(-x * x); };
  auto fp = [](double x) { return -2 * x * std::exp(-x * x); };
  CHECK(pde_weak_residual(pr, 0.5, f, fp, -1.0, 1.0) < 1e-6);
}

TEST_CASE("mean evolution") {
  auto p = harmonic();
  // β = 2: no source, zero stays zero
  StationaryField f2(hermite_eq());
  for (const auto& m : mean_evolution(f2, *p, 2.0, cplx(0.3, 0.5), 0.0, 0.1)) CHECK(std::abs(m.mean) == 0.0);
  StationaryField f(std::make_shared<SemicircleDensity>(1.0));
  // β = 1: |E| ≈ t·|¼U''(z)| for short times
  const cplx z0(0.3, 0.5);
  const double t = 1e-4;
  auto path = mean_evolution(f, *p, 1.0, z0, 0.0, t);
  CHECK(std::abs(path.back().mean) / t == doctest::Approx(std::abs(0.25 * f.d2u(0.0, z0))).epsilon(1e-3));
  CHECK_THROWS_AS(mean_evolution(f, *p, 1.0, cplx(0.3, -0.5), 0.0, 1.0), ConfigError);
}

TEST_CASE("short-distance asymptotics") {
  CHECK(short_distance(0.2, 0.4, 0.5, 0.0, 1e-3) == doctest::Approx(-1.0 / (2 * pi * pi) * 1e6 / 0.25));
  CHECK(short_distance(0.2, 0.4, 0.5, 0.3, 1e-3) == doctest::Approx(short_distance(0.2, 0.4, -0.5, -0.3, 1e-3)));
  CHECK_THROWS(short_distance(0.2, 0.4, 0.0, 0.0, 1e-3));
  const double x = 0.4, rho = std::sqrt(2 - x * x) / pi;
  const double r = hermite_g(1e-3 * 0.2, x + 1e-3 * 0.5, x) / short_distance(x, rho, 0.5, 0.2, 1e-3);
  CHECK(r == doctest::Approx(1.0).epsilon(0.02));
  // g⁺⁺ is half the real-part prediction's complex partner
  CHECK(short_distance_signed(x, rho, 0.5, 0.2, 1e-3).real() * 2 == doctest::Approx(short_distance(x, rho, 0.5, 0.2, 1e-3)));
}

TEST_CASE("hydrodynamic fluctuation operator on the Hermite kernel") {
  AngleKernel k = [](double dt, double phi) { return hermite_gtilde_minus(dt, phi); };
  const double r128 = fluct_operator_residual(k, 0.5, 128), r256 = fluct_operator_residual(k, 0.5, 256);
  CHECK(r128 / r256 == doctest::Approx(4.0).epsilon(0.1));
  CHECK_THROWS_AS(fluct_operator_residual(k, 0.5, 32), NumericalError);
  AngleKernel flat = [](double, double) { return 1.0; };
  CHECK(fluct_operator_residual(flat, 0.5, 64) < 1e-14);
  auto rates = mode_decay_rates(k, 0.5, 256, 8);
  for (int n = 1; n <= 8; ++n) CHECK(rates[n - 1] == doctest::Approx(n).epsilon(1e-5));
}

TEST_CASE("equal-time covariance is positive semidefinite") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto K = [](double a, double b) { return hermite_g(0.0, a, b); };
  for (int k = 0; k < 5; ++k) {
    const double a = u(rng), b = u(rng), c = 2 * u(rng), d = u(rng);
    auto f = [=](double x) { return a * x + b * x * x + std::sin(c * x) + d * std::exp(-x * x); };
    CHECK(kernel_pairing(K, f, f, sqrt2) >= 0.0);
  }
  // Σλ is an OU process with variance ½; Var Σλ² is ½ as well
  auto id = [](double x) { return x; };
  auto sq = [](double x) { return x * x; };
  CHECK(kernel_pairing(K, id, id, sqrt2) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(kernel_pairing(K, sq, sq, sqrt2) == doctest::Approx(0.5).epsilon(1e-8));
  auto K5 = [](double a, double b) { return hermite_g(0.5, a, b); };
  CHECK(kernel_pairing(K5, id, id, sqrt2) == doctest::Approx(0.5 * std::exp(-0.5)).epsilon(1e-8));
  CHECK(kernel_pairing(K5, sq, sq, sqrt2) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-8));
}

TEST_CASE("sign-slot conjugation") {
  KernelValue k;
  k.value = cplx(0.3, -0.8);
  k.eps1 = 1;
  k.eps2 = -1;
  auto c = conjugate_slot(k);
  CHECK(c.eps1 == -1);
  CHECK(c.eps2 == -1);
  CHECK(c.value == std::conj(k.value));
  CHECK(to_string(KernelMethod::GMap) != std::string(to_string(KernelMethod::PdeCharacteristics)));
}
