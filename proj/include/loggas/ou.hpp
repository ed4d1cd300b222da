#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "loggas/errors.hpp"

namespace loggas {

// Per-mode OU data for the cosine modes n = 1..nmax (n and −n coincide).
struct OUSpectral {
  std::vector<int> modes;
  std::vector<double> drift;           // Â(n)
  std::vector<double> noise_sq;        // ½|Σ̂(n)|²
  std::vector<double> stationary_cov;  // K̂_∞(n)

  size_t size() const { return modes.size(); }
  // throws unless K̂_∞ Â = noise_sq per mode within tol (relative)
  void check_lyapunov(double tol = 1e-12) const;
};

// (dt, n) ↦ K̂(dt, n), the n-th cosine coefficient of the stationary two-time kernel
using ModeKernel = std::function<double(double dt, int n)>;

struct IdentifyOptions {
  int nmax = 64;
  double h = 1e-3;      // stencil spacing in dt
  double start = 0.02;  // first stencil point; the kernel is a distribution at dt = 0
};

OUSpectral identify(const ModeKernel& k, const IdentifyOptions& opt = {});

// Cosine coefficients of g̃₋(dt, ·) from M angle samples; caches the last dt.
class HermiteModeKernel {
 public:
  explicit HermiteModeKernel(int M = 8192) : M_(M) {}
  double operator()(double dt, int n);

 private:
  int M_;
  double last_dt_ = -1.0;
  std::vector<double> coeffs_;
};

// (1/2π²) Σ_{n>nmax} n e^{−n dt}: K̂ weight lost by truncating at nmax
double hermite_tail_bias(int nmax, double dt);

struct OUTrajectory {
  std::vector<double> times;
  std::vector<int> modes;
  std::vector<std::vector<double>> values;  // values[k][j]: time k, mode j
};

struct SimulateOptions {
  // start from this state instead of a stationary draw
  std::optional<std::vector<double>> initial;
  int record_every = 1;
  std::uint64_t replica = 0;
};

// Exact Gaussian AR(1) recursion per mode.
OUTrajectory simulate(const OUSpectral& spec, double t_end, double dt, std::uint64_t seed,
                      const SimulateOptions& opt = {});

// Y(θ) = √2 Σ a_n cos nθ, whose two-time covariance is g̃₋ + g̃₊.
std::vector<double> assemble_field(const OUSpectral& spec, const std::vector<double>& amplitudes,
                                   const std::vector<double>& thetas);

void write_spectral_csv(const std::string& path, const OUSpectral& spec);
void write_ou_trajectory_csv(const std::string& path, const OUTrajectory& tr);

}  // namespace loggas
