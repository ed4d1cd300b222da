#include <cmath>

#include "doctest.h"
#include "loggas/density.hpp"
#include "loggas/potential.hpp"

using namespace loggas;

TEST_CASE("potential rejects malformed coefficient lists") {
  CHECK_THROWS_AS(Potential({0.0, 1.0, 0.0, 1.0}, 0.0), ConfigError);  // odd degree
  CHECK_THROWS_AS(Potential({0.0, 0.0, -1.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(Potential({0.0, 0.0, 0.5}, -1.0), ConfigError);
  CHECK_THROWS_AS(Potential({0.0, NAN, 0.5}, 0.0), ConfigError);
  CHECK_THROWS_AS(Potential::quartic(-0.5), ConfigError);
  CHECK_NOTHROW(Potential({0.0, 0.0, 0.5}, 0.0));
}

TEST_CASE("harmonic and quartic families are recognised") {
  auto h = Potential::harmonic(2.5);
  CHECK(h.is_harmonic());
  CHECK(h.harmonic_kappa() == doctest::Approx(2.5));
  CHECK_FALSE(h.quartic_c().has_value());
  auto q = Potential::quartic(0.7);
  CHECK_FALSE(q.is_harmonic());
  REQUIRE(q.quartic_c().has_value());
  CHECK(*q.quartic_c() == doctest::Approx(0.7));
  CHECK(q.degree() == 4);
}

TEST_CASE("derivatives agree with finite differences") {
  Potential p({0.3, -0.2, 0.8, 0.1, 0.25, 0.0, 0.05}, 0.0);
  const double h = 1e-4;
  for (double x : {-1.7, -0.3, 0.0, 0.9, 2.2}) {
    for (int k = 0; k < 3; ++k) {
      double fd = (p.eval(x + h, k) - p.eval(x - h, k)) / (2 * h);
      CHECK(p.eval(x + 0.0, k + 1) == doctest::Approx(fd).epsilon(1e-6));
    }
    cplx z(x, 0.4);
    for (int k = 0; k < 3; ++k) {
      cplx fd = (p.eval(z + h, k) - p.eval(z - h, k)) / (2 * h);
      CHECK(std::abs(p.eval(z, k + 1) - fd) < 1e-6 * (1 + std::abs(fd)));
    }
  }
}

TEST_CASE("T polynomial cancels the growing part of V'U") {
  // U = −Σ m_k z^{−k−1} makes V'U + T = −Σ_k z^{−k−1} Σ_j a_j m_{j+k}
  SemicircleDensity rho(1.3);
  for (auto p : {Potential::harmonic(1.0), Potential::quartic(0.4),
                 Potential({0.0, 0.1, 0.3, -0.05, 0.2, 0.0, 0.04}, 0.0)}) {
    auto t = t_polynomial(p, rho.moments(p.degree()));
    const auto& a = p.dcoeffs();
    for (cplx z : {cplx(20.0, 7.0), cplx(-5.0, 30.0)}) {
      cplx rest = p.eval(z, 1) * rho.stieltjes(z) + horner(t, z);
      cplx series = 0.0;
      for (int k = 0; k < 60; ++k) {
        double s = 0.0;
        for (size_t j = 0; j < a.size(); ++j) s += a[j] * rho.moment(static_cast<int>(j) + k);
        series -= s * std::pow(z, -1.0 - k);
      }
      // the sum cancels |V'U| down to |series|, so roundoff scales with the former
      CHECK(std::abs(rest - series) < 1e-12 * std::abs(p.eval(z, 1) * rho.stieltjes(z)) + 1e-9 * std::abs(series));
    }
  }
}

TEST_CASE("moment vector validation") {
  MomentVector ok{{1.0, 0.0, 0.25}};
  CHECK_NOTHROW(ok.validate());
  MomentVector bad_mass{{0.9, 0.0, 0.25}};
  CHECK_THROWS_AS(bad_mass.validate(), NumericalError);
  MomentVector bad_even{{1.0, 0.0, -0.25}};
  CHECK_THROWS_AS(bad_even.validate(), NumericalError);
}
