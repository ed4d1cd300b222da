#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "loggas/density.hpp"
#include "loggas/field.hpp"
#include "loggas/hydro.hpp"
#include "loggas/potential.hpp"

namespace loggas {

// Λ for complex angles; s1, s2 ∈ {+1, −1}.
cplx lambda_angles(double dt, cplx theta1, cplx theta2, int s1, int s2);

// Hermite Λ(dt; θ1, θ2) with sign labels; θ in (0, π).
cplx hermite_lambda(double dt, double theta1, double theta2, int s1, int s2);

// Real two-time covariance of the stationary Hermite (β=2, V=x²/2) fluctuation field.
double hermite_g(double dt, double x1, double x2);

// equal-time closed form −(1/2π²)(2−x1x2)/(√((2−x1²)(2−x2²))(x2−x1)²)
double hermite_equal_time(double x1, double x2);

// 2 sinθ1 sinθ2 g as a function of angles: the g̃₋ + g̃₊ pair.
double hermite_gtilde(double dt, double theta1, double theta2);
// the translation-invariant half, g̃₋(dt, φ) = −(1/8π²) Re sin⁻²((φ + i dt)/2)
double hermite_gtilde_minus(double dt, double phi);

// −(1/2π²) Re[g⁺⁺ − g⁺⁻]
double combine_signed(cplx gpp, cplx gpm);

struct SignedKernel {
  cplx pp, pm;
  double real = 0.0;
};

SignedKernel johansson_equal_time(double x1, double x2, double A, double beta);

// z ↦ g^{+,s}(z, x2) at equal times, continued from the support into Π₊ (and Π₋).
std::function<cplx(cplx)> johansson_slice(double x2, double A, double beta, int s);

enum class KernelMethod { ClosedForm, GMap, PdeCharacteristics };
const char* to_string(KernelMethod m);

struct KernelValue {
  double t1 = 0.0, t2 = 0.0, x1 = 0.0, x2 = 0.0;
  int eps1 = 1, eps2 = 1;
  cplx value;
  std::optional<double> real_kernel;
  KernelMethod method = KernelMethod::ClosedForm;
};

// sign-slot flip: g^{−,ε2} = conj g^{+,ε2}
KernelValue conjugate_slot(const KernelValue& k);

void write_kernel_csv(const std::string& path, const std::vector<KernelValue>& ks);
void write_real_kernel_csv(const std::string& path, const std::vector<KernelValue>& ks);

// Equilibrium G-map, G(x) = (2/β)∫₀ˣ dy/ρ_eq(y), with its continuation off the axis.
class GMap {
 public:
  static GMap build(std::shared_ptr<const Density> eq, std::shared_ptr<const Potential> p, double beta);

  double beta() const { return beta_; }
  double half_width() const { return a_; }
  const Density& density() const { return *eq_; }
  const Potential& potential() const { return *p_; }

  double G(double x) const;
  // straight-line quadrature of G' from w0 to z
  cplx G(cplx z, cplx w0 = 0.0) const;
  cplx dG(cplx z) const;
  // ρ_eq continued off the support: (U + (2/β)V') / (±iπ), sign of Im z;
  // on the axis the side is taken from `side`
  cplx rho_c(cplx z, int side = +1) const;

 private:
  std::shared_ptr<const Density> eq_;
  std::shared_ptr<const Potential> p_;
  double beta_ = 2.0, a_ = 0.0;
};

struct FlowResult {
  cplx z;
  double residual = 0.0;
  double min_edge_distance = 0.0;
};

// G⁻¹(G(x1) + iπ·direction·t) by integrating dz/dτ = iπ/G'(z).
FlowResult continuation_flow(const GMap& g, double x1, double t, int direction = +1);

// closed-form inverse for the quartic equilibrium
cplx quartic_flow_closed_form(double A, double c, double x1, double t);

// SplitTime flows each point by half the gap. It equals Theorem only when G is
// affine in the arccos angle (Hermite); otherwise the two differ at O(Δt²).
enum class StationaryForm { Theorem, SplitTime };

SignedKernel stationary_two_time(const GMap& g, double t1, double t2, double x1, double x2);
double stationary_two_time_g(const GMap& g, double t1, double t2, double x1, double x2,
                             StationaryForm form = StationaryForm::Theorem);

struct PdeKernelProblem {
  std::shared_ptr<const Potential> potential;
  double beta = 2.0;
  std::shared_ptr<const UField> field;  // U on [t2, t1]
  std::function<cplx(cplx)> initial;    // z ↦ g^{+,s}(t2, z; t2, x2), continued into Π₊
  double t2 = 0.0;
  std::vector<double> eps{1e-4, 5e-5};
  OdeOptions ode{1e-12, 1e-11};
};

// g^{+,s}(t1, x1; t2, x2) by transporting the initial slice along characteristics.
std::vector<cplx> pde_evolve_kernel(const PdeKernelProblem& prob, double t1, const std::vector<double>& x1s);

// d/dt1 ∫f g dx1 against −∫f'·v·g dx1, v = (β/2)U(x+i0)+V'; returns the residual.
double pde_weak_residual(const PdeKernelProblem& prob, double t1, const std::function<double(double)>& f,
                         const std::function<double(double)>& fprime, double a, double b, double dt = 1e-3);

struct MeanPoint {
  double t;
  cplx z, mean;
};

// E[(S Y_t)(z)] along the characteristic through z0, started from mean0 at t0.
std::vector<MeanPoint> mean_evolution(const UField& field, const Potential& p, double beta, cplx z0, double t0,
                                      double t1, cplx mean0 = 0.0, const OdeOptions& opt = {1e-12, 1e-11});

// −(1/2π²) ε⁻² Re[(δx + iπρδt)⁻²]
double short_distance(double x, double rho_at_x, double dx, double dt, double eps);
// −(1/4π²) ε⁻² (δx + iπρδt)⁻², the sign-resolved g⁺⁺ asymptotic
cplx short_distance_signed(double x, double rho_at_x, double dx, double dt, double eps);

using AngleKernel = std::function<double(double dt, double theta)>;

// sup_θ |∂_t k + ∂_θ H k| on an M-point angle grid, time derivative by central differences.
double fluct_operator_residual(const AngleKernel& k, double dt, int M);
// −d/dt log k̂_n at dt, n = 1..nmax
std::vector<double> mode_decay_rates(const AngleKernel& k, double dt, int M, int nmax);

// ∫∫ f(x1) h(x2) K(x1, x2) dx1 dx2 over [−A, A]², using ∫K dx2 = 0 to remove the diagonal singularity.
double kernel_pairing(const std::function<double(double, double)>& K, const std::function<double(double)>& f,
                      const std::function<double(double)>& h, double A);

}  // namespace loggas
