#include <cmath>
#include <cstdio>
#include <numbers>

#include "doctest.h"
#include "loggas/density.hpp"
#include "loggas/transforms.hpp"

using namespace loggas;
using std::numbers::pi;

namespace {

GridFunction sample(double a, double b, int n, double (*f)(double)) {
  GridFunction g;
  for (int i = 0; i < n; ++i) {
    double x = a + (b - a) * i / (n - 1);
    g.xs.push_back(x);
    g.values.push_back(f(x));
  }
  return g;
}

}  // namespace

TEST_CASE("Hilbert transform squared is minus the identity") {
  auto f = sample(-10, 10, 4096, [](double x) { return std::cos(12 * x) * std::exp(-x * x); });
  auto hh = hilbert_line(hilbert_line(f));
  double err = 0.0;
  for (size_t i = 0; i < f.xs.size(); ++i) err = std::max(err, std::abs(hh.values[i] + f.values[i]));
  CHECK(err < 1e-10);
}

TEST_CASE("Hilbert transform of the semicircle is linear on the support") {
  // (1/π) p.v.∫ρ(y)/(x−y)dy = 2x/(πR²) inside [−R, R]
  const double R = std::sqrt(2.0);
  SemicircleDensity sc(R);
  GridFunction g;
  const int n = 1 << 14;
  for (int i = 0; i < n; ++i) {
    double x = -2.0 + 4.0 * i / (n - 1);
    g.xs.push_back(x);
    g.values.push_back(sc.rho(x));
  }
  auto h = hilbert_line(g);
  double err = 0.0;
  for (int i = 0; i < n; ++i)
    if (std::abs(g.xs[i]) < 0.9 * R) err = std::max(err, std::abs(h.values[i] - 2 * g.xs[i] / (pi * R * R)));
  CHECK(err < 1e-4);
}

TEST_CASE("Hilbert transform of a modulated Gaussian") {
  // H[cos(a x)e^{−x²}] → sin(a x)e^{−x²} with error of order e^{−a²/4}
  auto f = sample(-12, 12, 8192, [](double x) { return std::cos(14 * x) * std::exp(-x * x); });
  auto h = hilbert_line(f);
  double err = 0.0;
  for (size_t i = 0; i < f.xs.size(); ++i)
    err = std::max(err, std::abs(h.values[i] - std::sin(14 * f.xs[i]) * std::exp(-f.xs[i] * f.xs[i])));
  CHECK(err < 1e-12);
}

TEST_CASE("non-uniform grids are rejected") {
  GridFunction g{{0.0, 0.1, 0.3}, {1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(hilbert_line(g), ConfigError);
  CHECK_THROWS_AS(hilbert_line(sample(0, 1, 16, [](double) { return 0.0; }), {1}), ConfigError);
}

TEST_CASE("periodic coefficients round trip") {
  const int M = 256;
  std::vector<double> s(M);
  for (int j = 0; j < M; ++j) {
    double th = 2 * pi * j / M;
    s[j] = 0.3 + std::cos(th) - 0.5 * std::sin(3 * th) + 0.25 * std::cos(7 * th);
  }
  auto c = periodic_coefficients(s, 20);
  CHECK(std::abs(c[0] - 0.3) < 1e-14);
  CHECK(std::abs(c[1] - 0.5) < 1e-14);
  CHECK(std::abs(c[3] - cplx(0.0, 0.25)) < 1e-14);
  CHECK(std::abs(c[-3] - cplx(0.0, -0.25)) < 1e-14);
  CHECK(std::abs(c[7] - 0.125) < 1e-14);
  auto back = periodic_samples(c, M);
  for (int j = 0; j < M; ++j) CHECK(back[j] == doctest::Approx(s[j]).epsilon(1e-13));
  CHECK(std::abs(c.eval(0.7) - (0.3 + std::cos(0.7) - 0.5 * std::sin(2.1) + 0.25 * std::cos(4.9))) < 1e-13);
  CHECK_THROWS_AS(periodic_coefficients(s, 128), ConfigError);
}

TEST_CASE("periodic Hilbert transform maps cos to sin and requires zero mean") {
  auto c = PeriodicCoefficients::zeros(4);
  c[2] = c[-2] = 0.5;  // cos 2θ
  auto h = hilbert_periodic(c);
  for (double th : {0.1, 1.3, 2.9}) CHECK(h.eval(th).real() == doctest::Approx(std::sin(2 * th)));
  auto hh = hilbert_periodic(h);
  for (int n = -4; n <= 4; ++n) CHECK(std::abs(hh[n] + c[n]) < 1e-15);
  c[0] = 1.0;
  CHECK_THROWS_AS(hilbert_periodic(c), ConfigError);
}

TEST_CASE("Plemelj extraction recovers the density") {
  SemicircleDensity sc(1.0);
  for (double x : {-0.8, 0.0, 0.45}) {
    auto v = plemelj_density([&](double e) { return sc.stieltjes(cplx(x, e)); }, 1e-4,
                             std::make_pair(-1.0, 1.0), x);
    CHECK(v.rho == doctest::Approx(sc.rho(x)).epsilon(1e-7));
    CHECK_FALSE(v.near_edge);
  }
  // a function with negative imaginary boundary part is not a density
  CHECK_THROWS_AS(plemelj_density([](double e) { return cplx(0.0, -1.0 + e); }, 1e-3), NumericalError);
  CHECK_THROWS_AS(plemelj_density([](double) { return cplx(0.0); }, 0.0), ConfigError);
}

TEST_CASE("grid Stieltjes transform matches the closed form off the axis") {
  SemicircleDensity sc(2.0);
  GridFunction g;
  for (int i = 0; i <= 20000; ++i) {
    double x = -2.0 + 4.0 * i / 20000;
    g.xs.push_back(x);
    g.values.push_back(sc.rho(x));
  }
  for (cplx z : {cplx(0.5, 0.5), cplx(-3.0, 0.2), cplx(1.0, -1.0)})
    CHECK(std::abs(stieltjes(g, z) - sc.stieltjes(z)) < 1e-5);
}

TEST_CASE("CSV round trips") {
  auto f = sample(-1, 1, 33, [](double x) { return x * x - 0.1; });
  const std::string path = "transforms_grid_roundtrip.csv";
  write_grid_csv(path, f);
  auto g = read_grid_csv(path);
  REQUIRE(g.xs.size() == f.xs.size());
  for (size_t i = 0; i < f.xs.size(); ++i) {
    CHECK(g.xs[i] == f.xs[i]);
    CHECK(g.values[i] == f.values[i]);
  }
  auto c = PeriodicCoefficients::zeros(3);
  c[1] = cplx(0.25, -1.0 / 3);
  c[-1] = std::conj(c[1]);
  const std::string ppath = "transforms_periodic_roundtrip.csv";
  write_periodic_csv(ppath, c);
  auto d = read_periodic_csv(ppath);
  REQUIRE(d.nmax == 3);
  for (int n = -3; n <= 3; ++n) CHECK(d[n] == c[n]);
  std::remove(path.c_str());
  std::remove(ppath.c_str());
  CHECK_THROWS_AS(read_grid_csv("does/not/exist.csv"), ConfigError);
}
