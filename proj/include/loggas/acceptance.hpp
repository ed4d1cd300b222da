#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace loggas {

struct Metric {
  std::string name;
  double observed = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  // observed must lie in [lower, tolerance] when set (ratio checks)
  bool two_sided = false;
  double lower = 0.0;
};

struct CheckResult {
  int id = 0;
  std::string name;
  std::vector<Metric> metrics;
  double seconds = 0.0;
  std::string note;

  bool pass() const;
};

struct AcceptanceOptions {
  int workers = 1;
  std::uint64_t seed = 20261016;
  int mc_N = 200;
  int mc_replicas = 20000;
  double mc_dt = 5e-3;
};

CheckResult check_hydro_scaling(const AcceptanceOptions& o);         // 1
CheckResult check_support_edge(const AcceptanceOptions& o);          // 2
CheckResult check_harmonic_characteristics(const AcceptanceOptions& o);  // 3
CheckResult check_hermite_triangle(const AcceptanceOptions& o);      // 4
CheckResult check_quartic_flow(const AcceptanceOptions& o);          // 5
CheckResult check_monte_carlo(const AcceptanceOptions& o);           // 6
CheckResult check_short_distance(const AcceptanceOptions& o);        // 7
CheckResult check_ou(const AcceptanceOptions& o);                    // 8
CheckResult check_transforms(const AcceptanceOptions& o);            // 9
CheckResult check_properties(const AcceptanceOptions& o);            // 10

// Runs the listed criteria (all when empty), in order.
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& o, const std::vector<int>& which = {});

std::string format_line(const CheckResult& r);
std::string acceptance_report_json(const std::vector<CheckResult>& rs);

}  // namespace loggas
