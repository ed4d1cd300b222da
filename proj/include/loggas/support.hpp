#pragma once

#include <memory>
#include <string>
#include <vector>

#include "loggas/hydro.hpp"

namespace loggas {

struct SupportInputs {
  std::shared_ptr<const Potential> potential;
  double beta = 2.0;
  std::shared_ptr<const Density> initial;
  std::shared_ptr<const TSource> T;
  OdeOptions ode;
  // caller vouches that initial->stieltjes is real-analytic off the support
  bool certified_off_support = false;

  static SupportInputs from(const HydroProblem& prob, double t_end);
};

struct RealCharacteristic {
  double z = 0.0;
  double jacobian = 1.0;  // dZ_t/dx0
  double velocity = 0.0;  // ż at time t
};

RealCharacteristic real_characteristic_with_jacobian(double x0, double t, const SupportInputs& in);

enum class Side { Left, Right };

struct EdgeScan {
  int points = 256;
  double bisect_tol = 1e-10;
};

struct EdgeResult {
  double x_star = 0.0;
  double edge = 0.0;
  bool boundary_case = false;
  double margin = 0.0;  // min Z'_t over scan points beyond x_star
  double speed = 0.0;   // |ż| at the pre-image
};

EdgeResult edge(double t, Side side, const SupportInputs& in, const EdgeScan& scan = {});

struct EdgeTrajectory {
  std::vector<double> times, a, b, a_star, b_star, margin;
  std::vector<bool> boundary;
  // indices k where b (or −a) rose faster than the edge speed allows
  std::vector<int> jumps;

  void write_csv(const std::string& path) const;
};

EdgeTrajectory track_support(const std::vector<double>& times, const SupportInputs& in, const EdgeScan& scan = {});

}  // namespace loggas
