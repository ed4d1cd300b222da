#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "loggas/support.hpp"

using namespace loggas;
using std::numbers::sqrt2;

namespace {

SupportInputs scaling_inputs(double s0, double t_end) {
  HydroProblem pr;
  pr.potential = std::make_shared<Potential>(Potential::harmonic(1.0));
  pr.beta = 2.0;
  pr.initial = std::make_shared<SemicircleDensity>(sqrt2 * s0);
  return SupportInputs::from(pr, t_end);
}

}  // namespace

TEST_CASE("right edge follows the scaling solution") {
  for (double s0 : {0.5, 2.0}) {
    auto in = scaling_inputs(s0, 1.0);
    for (double t : {0.2, 0.6, 1.0}) {
      auto e = edge(t, Side::Right, in);
      CHECK(e.edge == doctest::Approx(sqrt2 * scaling_solution(s0, t)).epsilon(1e-6));
      // pre-image satisfies x/√(x²−b0²) − 1 = ½b0²(coth t − 1)
      const double b0 = sqrt2 * s0, x = e.x_star;
      CHECK(x / std::sqrt(x * x - b0 * b0) - 1 == doctest::Approx(0.5 * b0 * b0 * (1 / std::tanh(t) - 1)).epsilon(1e-8));
      CHECK(e.margin >= 0.0);
    }
  }
}

TEST_CASE("symmetric data give symmetric supports") {
  auto in = scaling_inputs(1.4, 1.0);
  auto tr = track_support({0.1, 0.3, 0.9}, in);
  for (size_t k = 0; k < tr.times.size(); ++k) {
    CHECK(tr.a[k] == doctest::Approx(-tr.b[k]).epsilon(1e-9));
    CHECK(tr.a_star[k] == doctest::Approx(-tr.b_star[k]).epsilon(1e-9));
  }
  CHECK(tr.jumps.empty());
}

TEST_CASE("real characteristic Jacobian matches a finite difference") {
  auto in = scaling_inputs(0.8, 1.0);
  for (double x0 : {2.5, 3.5, 5.0}) {
    const double h = 1e-5;
    auto c = real_characteristic_with_jacobian(x0, 0.7, in);
    REQUIRE(c.jacobian > 0.0);
    double fd = (real_characteristic_with_jacobian(x0 + h, 0.7, in).z -
                 real_characteristic_with_jacobian(x0 - h, 0.7, in).z) /
                (2 * h);
    CHECK(c.jacobian == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("equilibrium support does not move") {
  HydroProblem pr;
  pr.potential = std::make_shared<Potential>(Potential::quartic(0.5));
  pr.beta = 2.0;
  auto eq = std::make_shared<QuarticEquilibrium>(0.5, 2.0);
  pr.initial = eq;
  auto in = SupportInputs::from(pr, 1.0);
  for (double t : {0.05, 0.3}) CHECK(edge(t, Side::Right, in).edge == doctest::Approx(eq->half_width()).epsilon(1e-6));
}
