#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "loggas/density.hpp"
#include "loggas/potential.hpp"

namespace loggas {

inline constexpr const char* kScenarioSchema = "loggas-scenario/1";

enum class InitialKind { ScaledSemicircle, QuarticEquilibrium, Equilibrium, Tabulated };

struct Tolerances {
  double ode_atol = 1e-12;
  double ode_rtol = 1e-11;
  double plemelj_eps = 1e-4;
  double edge_bisect = 1e-10;
};

struct KernelSpec {
  double x2 = 0.3;
  std::vector<double> x1{-1.0, -0.5, 0.0, 0.5, 1.0};
  std::vector<double> dt{0.25, 0.5, 1.0};
};

struct OuSpec {
  int nmax = 64;
  double dt = 5e-3;
  double t_end = 5.0;
  int record_every = 10;
};

struct Scenario {
  std::string schema = kScenarioSchema;
  std::string potential_family = "harmonic";  // harmonic | quartic | polynomial
  double kappa = 1.0;
  double c = 0.0;
  std::vector<double> coeffs;
  double alpha = 0.0;
  double beta = 2.0;

  InitialKind initial = InitialKind::ScaledSemicircle;
  double s0 = 1.0;
  std::string tabulated_path;

  int N = 100;
  double horizon = 1.0;
  double dt = 5e-3;
  int replicas = 1000;
  std::uint64_t seed = 1;
  std::string output = "out";
  int snapshots = 5;
  Tolerances tol;
  KernelSpec kernel;
  OuSpec ou;

  // throws ConfigError with a message naming the violated rule
  void validate() const;

  std::shared_ptr<const Potential> make_potential() const;
  std::shared_ptr<const Density> make_initial() const;
  std::shared_ptr<const Density> make_equilibrium() const;
  // evenly spaced horizon/snapshots, …, horizon
  std::vector<double> times() const;
};

// Parse JSON text; relative tabulated paths resolve against base_dir.
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);
std::string scenario_json(const Scenario& s);

}  // namespace loggas
