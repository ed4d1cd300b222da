#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "loggas/density.hpp"
#include "loggas/ode.hpp"
#include "loggas/potential.hpp"

namespace loggas {

struct ParticleState {
  std::vector<double> lambdas;  // strictly increasing
  double t = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;
  std::uint64_t step_index = 0;

  int size() const { return static_cast<int>(lambdas.size()); }
  bool ordered() const;
};

struct StepStats {
  long steps = 0;
  long rejections = 0;
  int max_depth = 0;
  long implicit_steps = 0;  // substeps taken semi-implicitly
};

struct StepOptions {
  double dt_min = 1e-10;
  // refinement depth at which a failing substep is taken semi-implicitly
  int implicit_depth = 1;
  // a substep is also rejected if some gap falls below this fraction of its old value
  double gap_shrink = 0.0;
  double radius = std::numeric_limits<double>::infinity();
  bool noise = true;
};

// (β/2N)Σ_{j≠i} 1/(λi−λj) − V'(λi)
std::vector<double> drift(const std::vector<double>& lambdas, const Potential& p, double beta);

// One Euler–Maruyama step of size dt; a step that breaks the ordering (or
// leaves some gap below gap_shrink times its old value) is split in two halves
// with a Brownian-bridge midpoint, recursively. From depth implicit_depth on, the substep treats the
// nearest-neighbour repulsion implicitly, which always keeps the ordering.
ParticleState step(const ParticleState& s, double dt, const Potential& p, double beta,
                   const StepOptions& opt = {}, StepStats* stats = nullptr);

// Noise-free dynamics integrated with RK45.
ParticleState drift_flow(const ParticleState& s, double t_end, const Potential& p, double beta,
                         const OdeOptions& opt = {});

struct EmpiricalMeasure {
  std::vector<double> atoms;
  double weight() const { return 1.0 / static_cast<double>(atoms.size()); }
};

EmpiricalMeasure empirical_measure(const ParticleState& s);

// (1/N)Σ 1/(λi−z)
cplx empirical_stieltjes(const ParticleState& s, cplx z);

using TestFunction = std::function<double(double)>;

// Σ f(λi) − N∫fρ
double pair_fluctuation(const ParticleState& s, const TestFunction& f, const Density& reference);
double pair_fluctuation(const ParticleState& s, const TestFunction& f, double reference_integral);

enum class Placement { Quantile, Iid, BetaHermite };

ParticleState quantile_state(const Density& rho, int N);
ParticleState iid_state(const Density& rho, int N, std::uint64_t seed, std::uint64_t replica);
// Exact draw from the stationary law of the harmonic system V = κx²/2,
// via the tridiagonal β-Hermite model.
ParticleState beta_hermite_state(int N, double beta, double kappa, std::uint64_t seed, std::uint64_t replica);

struct McConfig {
  std::shared_ptr<const Potential> potential;
  double beta = 2.0;
  int N = 100;
  double dt = 5e-3;
  double burn_in = 0.0;
  Placement placement = Placement::Quantile;
  std::shared_ptr<const Density> initial;    // for Quantile / Iid
  std::shared_ptr<const Density> reference;  // ρ in the pairing
  std::uint64_t seed = 1;
  int workers = 1;
  StepOptions step;
};

// samples[r][k * nf + j]: replica r, k-th time, j-th test function.
struct LinearStatSamples {
  int replicas = 0;
  std::vector<double> times;
  int nfuncs = 0;
  std::vector<std::vector<double>> samples;
  StepStats stats;

  std::vector<double> column(int time_index, int func_index) const;
};

LinearStatSamples sample_linear_statistics(const McConfig& cfg, const std::vector<TestFunction>& funcs,
                                           const std::vector<double>& times, int replicas);

struct CovarianceEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  int replicas = 0;
};

CovarianceEstimate jackknife_covariance(const std::vector<double>& a, const std::vector<double>& b);

CovarianceEstimate mc_covariance(const McConfig& cfg, const TestFunction& f, const TestFunction& g,
                                 double t1, double t2, int replicas);

// (count, mean, M2) with pairwise merge
struct RunningMoments {
  long n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x);
  void merge(const RunningMoments& o);
  double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

void write_trajectory_csv(const std::string& path, const std::vector<ParticleState>& states);
std::string covariance_json(const CovarianceEstimate& e);

}  // namespace loggas
