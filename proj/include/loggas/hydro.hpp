#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "loggas/density.hpp"
#include "loggas/field.hpp"
#include "loggas/ode.hpp"
#include "loggas/potential.hpp"

namespace loggas {

// s(t) = √(1 + e^{−2t}(s0² − 1))
double scaling_solution(double s0, double t);

enum class Closure { FreezeInitial, ZeroDerivative };

struct MomentClosure {
  int K = 12;
  Closure kind = Closure::FreezeInitial;
};

// Extra moments beyond K needed by the hierarchy: deg V' − 1.
int closure_margin(const Potential& p);

// dm_k/dt for k ≤ K; entries above K (the closure tail) get derivative 0.
std::vector<double> moment_rhs(const MomentVector& m, const Potential& p, double beta, const MomentClosure& c);

// Supplies T'_t and T''_t to the characteristic equations.
class TSource {
 public:
  virtual ~TSource() = default;
  virtual std::vector<double> coeffs(double t) const = 0;
  cplx dT(double t, cplx z) const;
  cplx d2T(double t, cplx z) const;
};

class MomentTrajectory : public TSource {
 public:
  static MomentTrajectory solve(const Potential& p, double beta, const MomentVector& initial,
                                const MomentClosure& closure, double t_end, const OdeOptions& opt = {});
  static MomentTrajectory constant(const Potential& p, const MomentVector& m);

  MomentVector at(double t) const;
  std::vector<double> coeffs(double t) const override;
  double t_end() const { return ts_.back(); }
  const std::vector<double>& node_times() const { return ts_; }

 private:
  std::shared_ptr<const Potential> p_;
  std::vector<double> ts_;
  std::vector<std::vector<double>> ms_, dms_;
};

struct InitialSlice {
  std::function<cplx(cplx)> u, du;
  static InitialSlice from(std::shared_ptr<const Density> d);
  static InitialSlice from(const UField& f, double t);
};

struct CharState {
  double t = 0.0;
  cplx z, zdot, c, logA;
  cplx dz = 1.0, dc = 0.0;  // variational pair (∂z/∂z0, ∂C/∂z0)
  cplx z0;                  // launch point
  bool alive = true;
  double kill_time = 0.0;
};

struct FlowOptions {
  OdeOptions ode;
  bool kill = true;
};

// Path of accepted RK45 steps from z0 at t0 to t_end, carrying C = −U.
std::vector<CharState> characteristic_flow(cplx z0, double t_end, const InitialSlice& u0, const Potential& p,
                                           double beta, const TSource& T, const FlowOptions& opt = {},
                                           double t0 = 0.0);

// Endpoint only, from an arbitrary state.
CharState propagate(CharState s, double t_end, const Potential& p, double beta, const TSource& T,
                    const FlowOptions& opt = {});

CharState launch(cplx z0, double t0, const InitialSlice& u0, const Potential& p, double beta);

struct FanGeometry {
  int n_real = 64;
  int n_imag = 32;
  double span_factor = 3.0;
  double imag_min = 1e-4;
  double imag_max = 1.0;
};

struct HydroProblem {
  std::shared_ptr<const Potential> potential;
  double beta = 2.0;
  std::shared_ptr<const Density> initial;
  MomentClosure closure;
  OdeOptions ode;
  double plemelj_eps = 1e-4;
};

struct UFieldValue {
  cplx value;
  double error_estimate = 0.0;
  cplx preimage;
};

class HydroField : public UField {
 public:
  static HydroField solve(const HydroProblem& prob, std::vector<double> times, const FanGeometry& fan = {});

  const std::vector<double>& times() const { return times_; }
  const MomentTrajectory& moments() const { return *moments_; }
  const HydroProblem& problem() const { return prob_; }
  // fan snapshot k: one state per launch point, row-major (imag level, real index)
  const std::vector<CharState>& snapshot(size_t k) const { return fan_[k]; }

  UFieldValue u_field(double t, cplx z) const;
  cplx u(double t, cplx z) const override;
  cplx du(double t, cplx z) const override;
  double density(double t, double x) const;

  // Newton solve of Z_t(z0) = z from a given starting guess.
  CharState refine(double t, cplx z, cplx guess) const;

  void write_snapshots_csv(const std::string& path) const;
  void write_density_csv(const std::string& path, const std::vector<double>& xs) const;

 private:
  size_t nearest_snapshot(double t) const;
  bool in_hull(size_t k, cplx z) const;
  bool locate(size_t k, cplx z, cplx& z0, cplx& u) const;
  cplx nearest_guess(size_t k, cplx z) const;

  HydroProblem prob_;
  InitialSlice u0_;
  std::vector<double> times_;
  FanGeometry geom_;
  std::shared_ptr<const MomentTrajectory> moments_;
  std::vector<std::vector<CharState>> fan_;
  std::vector<cplx> launch_;
  std::vector<std::vector<cplx>> hull_;
};

}  // namespace loggas
