#include <cmath>
#include <memory>

#include "doctest.h"
#include "loggas/density.hpp"
#include "loggas/sde.hpp"

using namespace loggas;

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("drift matches the pairwise formula") {
  auto p = Potential::quartic(0.3);
  std::vector<double> lam{-1.2, -0.4, 0.05, 0.3, 1.7};
  const double beta = 1.5;
  auto b = drift(lam, p, beta);
  for (size_t i = 0; i < lam.size(); ++i) {
    double s = 0.0;
    for (size_t j = 0; j < lam.size(); ++j)
      if (j != i) s += 1.0 / (lam[i] - lam[j]);
    double ref = beta / (2.0 * lam.size()) * s - (std::pow(lam[i], 3) + 0.3 * lam[i]);
    CHECK(b[i] == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("steps are reproducible and keep the ordering") {
  auto p = Potential::harmonic(1.0);
  SemicircleDensity sc(std::sqrt(2.0));
  for (double beta : {1.0, 2.0, 4.0}) {
    auto s = quantile_state(sc, 40);
    s.seed = 9;
    s.replica = 3;
    StepStats st;
    auto a = s, b = s;
    for (int k = 0; k < 300; ++k) {
      a = step(a, 0.01, p, beta, {}, &st);
      b = step(b, 0.01, p, beta);
      REQUIRE(a.ordered());
    }
    CHECK(a.lambdas == b.lambdas);
    CHECK(a.step_index == 300);
    CHECK(a.t == doctest::Approx(3.0));
    CHECK(st.steps == 300);
  }
}

TEST_CASE("semi-implicit substep solves its defining equation") {
  // the middle particle is shoved across its left neighbour by an explicit step
  auto p = Potential::harmonic(1.0);
  ParticleState s;
  s.lambdas = {0.0, 1e-2, 1e-2 + 1e-4};
  const double beta = 2.0, dt = 1e-3, k = beta / 6.0;
  StepOptions opt;
  opt.noise = false;
  opt.implicit_depth = 0;
  StepStats st;
  auto out = step(s, dt, p, beta, opt, &st);
  CHECK(st.implicit_steps == 1);
  REQUIRE(out.ordered());
  auto near = [&](const std::vector<double>& v, size_t i) {
    double r = 0.0;
    if (i > 0) r += k / (v[i] - v[i - 1]);
    if (i + 1 < v.size()) r -= k / (v[i + 1] - v[i]);
    return r;
  };
  auto b = drift(s.lambdas, p, beta);
  for (size_t i = 0; i < 3; ++i) {
    double rhs = s.lambdas[i] + dt * (b[i] - near(s.lambdas, i) + near(out.lambdas, i));
    CHECK(out.lambdas[i] == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("forced semi-implicit stepping at beta=1 never breaks the ordering") {
  auto p = Potential::harmonic(1.0);
  SemicircleDensity sc(1.0);
  StepOptions opt;
  opt.implicit_depth = 0;
  StepStats st;
  for (std::uint64_t r = 0; r < 20; ++r) {
    auto s = quantile_state(sc, 30);
    s.replica = r;
    for (int k = 0; k < 200; ++k) {
      s = step(s, 0.05, p, 1.0, opt, &st);
      REQUIRE(s.ordered());
    }
  }
  CHECK(st.implicit_steps > 0);
}

TEST_CASE("linear statistics do not depend on the worker count") {
  McConfig cfg;
  cfg.potential = std::make_shared<Potential>(Potential::harmonic(1.0));
  cfg.beta = 2.0;
  cfg.N = 20;
  cfg.dt = 0.01;
  cfg.initial = std::make_shared<SemicircleDensity>(std::sqrt(2.0));
  cfg.reference = cfg.initial;
  cfg.seed = 77;
  std::vector<TestFunction> f{[](double x) { return x; }, [](double x) { return x * x; }};
  cfg.workers = 1;
  auto a = sample_linear_statistics(cfg, f, {0.0, 0.2, 0.5}, 16);
  cfg.workers = 4;
  auto b = sample_linear_statistics(cfg, f, {0.0, 0.2, 0.5}, 16);
  REQUIRE(a.samples.size() == 16);
  CHECK(a.samples == b.samples);
  CHECK(a.stats.steps == b.stats.steps);
}

TEST_CASE("beta-Hermite draws have the stationary second moment") {
  // Itô on Σλ² at stationarity: 2κ E Σλ² = β(N−1)/2 + 1
  for (double beta : {1.0, 2.0, 4.0}) {
    const int N = 10, R = 4000;
    const double kappa = 1.3;
    std::vector<double> v;
    for (int r = 0; r < R; ++r) {
      auto s = beta_hermite_state(N, beta, kappa, 5, static_cast<std::uint64_t>(r));
      REQUIRE(s.ordered());
      double q = 0.0;
      for (double l : s.lambdas) q += l * l;
      v.push_back(q);
    }
    double m = mean(v), var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    double se = std::sqrt(var / (R - 1) / R);
    CHECK(std::abs(m - (beta * (N - 1) / 2 + 1) / (2 * kappa)) < 4 * se);
  }
}

TEST_CASE("jackknife covariance of independent columns") {
  std::vector<double> a, b;
  for (int i = 0; i < 200; ++i) {
    a.push_back(std::sin(1.7 * i));
    b.push_back(2 * std::sin(1.7 * i) + 0.1);
  }
  auto e = jackknife_covariance(a, b);
  double ma = mean(a), c = 0.0;
  for (double x : a) c += (x - ma) * (x - ma);
  CHECK(e.estimate == doctest::Approx(2 * c / 199).epsilon(1e-10));
  CHECK(e.replicas == 200);
  CHECK(e.standard_error > 0.0);
  CHECK_THROWS_AS(jackknife_covariance({1.0, 2.0}, {1.0, 2.0}), ConfigError);
}

TEST_CASE("running moments merge like a single pass") {
  RunningMoments all, x, y;
  for (int i = 0; i < 100; ++i) {
    double v = std::cos(0.3 * i) * (i % 7);
    all.push(v);
    (i < 37 ? x : y).push(v);
  }
  x.merge(y);
  CHECK(x.n == all.n);
  CHECK(x.mean == doctest::Approx(all.mean).epsilon(1e-13));
  CHECK(x.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("pairing and empirical transform") {
  SemicircleDensity sc(2.0);
  auto s = quantile_state(sc, 500);
  CHECK(std::abs(pair_fluctuation(s, [](double x) { return x; }, sc)) < 1e-10);
  cplx z(0.3, 0.4);
  CHECK(std::abs(empirical_stieltjes(s, z) - sc.stieltjes(z)) < 1e-3);
  CHECK_THROWS(empirical_stieltjes(s, cplx(0.3, 0.0)));
}

TEST_CASE("drift flow relaxes to the equilibrium quantiles") {
  auto p = Potential::harmonic(1.0);
  SemicircleDensity wide(3.0);
  auto s = drift_flow(quantile_state(wide, 50), 20.0, p, 2.0);
  REQUIRE(s.ordered());
  // stationary points of the noise-free system satisfy Σλ² = (N−1)/2 exactly
  double q = 0.0;
  for (double l : s.lambdas) q += l * l;
  CHECK(q == doctest::Approx(49.0 / 2).epsilon(1e-8));
}

TEST_CASE("invalid step arguments") {
  auto p = Potential::harmonic(1.0);
  ParticleState s;
  s.lambdas = {0.0, 1.0};
  CHECK_THROWS_AS(step(s, 0.0, p, 2.0), ConfigError);
  s.lambdas = {1.0, 0.0};
  CHECK_THROWS_AS(step(s, 0.01, p, 2.0), NumericalError);
  StepOptions opt;
  opt.radius = 0.5;
  s.lambdas = {0.0, 1.0};
  CHECK_THROWS_AS(step(s, 0.01, p, 2.0, opt), NumericalError);
}
