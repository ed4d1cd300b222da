#include <cmath>
#include <string>

#include "doctest.h"
#include "loggas/scenario.hpp"

using namespace loggas;

namespace {

std::string error_of(const std::string& json) {
  try {
    parse_scenario(json).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal scenario takes defaults") {
  auto s = parse_scenario(R"({"schema": "loggas-scenario/1"})");
  CHECK_NOTHROW(s.validate());
  CHECK(s.potential_family == "harmonic");
  CHECK(s.beta == 2.0);
  CHECK(s.initial == InitialKind::ScaledSemicircle);
}

TEST_CASE("fields are read") {
  auto s = parse_scenario(R"({
    "schema": "loggas-scenario/1",
    "potential": {"family": "quartic", "c": 0.5},
    "beta": 4,
    "initial": {"kind": "quartic-equilibrium"},
    "N": 64, "horizon": 2.5, "dt": 0.002, "replicas": 100, "seed": 42, "snapshots": 5,
    "tolerances": {"ode_atol": 1e-11},
    "kernel": {"x2": -0.2, "x1": [0.1, 0.4], "dt": [0.5]},
    "ou": {"nmax": 16}
  })");
  s.validate();
  CHECK(s.potential_family == "quartic");
  CHECK(s.c == 0.5);
  CHECK(s.beta == 4.0);
  CHECK(s.N == 64);
  CHECK(s.seed == 42);
  CHECK(s.tol.ode_atol == 1e-11);
  CHECK(s.kernel.x1.size() == 2);
  CHECK(s.ou.nmax == 16);
  auto ts = s.times();
  REQUIRE(ts.size() == 5);
  CHECK(ts.front() == doctest::Approx(0.5));
  CHECK(ts.back() == doctest::Approx(2.5));
  auto rho = s.make_initial();
  CHECK(rho->upper() == doctest::Approx(QuarticEquilibrium(0.5, 4.0).half_width()));
}

TEST_CASE("scaled semicircle radius") {
  auto s = parse_scenario(R"({"schema": "loggas-scenario/1", "potential": {"kappa": 2}, "beta": 1,
                              "initial": {"kind": "scaled-semicircle", "s0": 1.5}})");
  CHECK(s.make_initial()->upper() == doctest::Approx(1.5 * std::sqrt(1.0 / 2.0)));
}

TEST_CASE("validation messages name the rule") {
  CHECK(error_of(R"({"schema": "loggas-scenario/1", "beta": 0.5})") == "beta ≥ 1 required");
  CHECK(error_of(R"({"schema": "loggas-scenario/1", "N": 0})") == "N ≥ 1 required");
  CHECK(error_of(R"({"schema": "loggas-scenario/1", "horizon": -1})") == "horizon > 0 required");
  CHECK(error_of(R"({"schema": "loggas-scenario/1", "tolerances": {"ode_rtol": 0}})") == "all tolerances must be > 0");
  CHECK(error_of(R"({"schema": "loggas-scenario/2"})").find("unsupported scenario schema") == 0);
  CHECK(error_of(R"({"schema": "loggas-scenario/1", "beta": "two"})").find("wrong type") != std::string::npos);
  CHECK(error_of(R"({"schema": "loggas-scenario/1", "initial": {"kind": "blob"}})").find("unknown initial kind") == 0);
  CHECK(error_of("{not json").find("not valid JSON") != std::string::npos);
  CHECK(error_of(R"({"beta": 2})") == "scenario lacks a schema field");
}

TEST_CASE("round trip through JSON") {
  auto s = parse_scenario(R"({"schema": "loggas-scenario/1", "potential": {"family": "polynomial", "coeffs": [0, 0, 0.5, 0, 0.1]},
                              "beta": 1.5, "initial": {"kind": "equilibrium"}, "seed": 7})");
  auto t = parse_scenario(scenario_json(s));
  CHECK(t.potential_family == "polynomial");
  CHECK(t.coeffs == s.coeffs);
  CHECK(t.beta == 1.5);
  CHECK(t.seed == 7);
  CHECK(t.initial == InitialKind::Equilibrium);
  CHECK_THROWS_AS(load_scenario("no/such/file.json"), ConfigError);
}
