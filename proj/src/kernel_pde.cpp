#include <boost/math/quadrature/gauss.hpp>

#include <cmath>

#include "loggas/fluctuation.hpp"
#include "loggas/ode.hpp"

namespace loggas {

namespace {

using Vec2 = Eigen::Matrix<cplx, 2, 1>;

// Backward transport from (t1, z1) to t2 along ż = −v, carrying ∂z0/∂z1.
Vec2 pull_back(const PdeKernelProblem& prob, double t1, cplx z1) {
  const UField& U = *prob.field;
  const Potential& p = *prob.potential;
  const double hb = 0.5 * prob.beta;
  auto rhs = [&](double t, const Vec2& y) {
    const cplx z = y[0];
    Vec2 d;
    d[0] = -(hb * U.u(t, z) + p.eval(z, 1));
    d[1] = -(hb * U.du(t, z) + p.eval(z, 2)) * y[1];
    return d;
  };
  auto obs = [&](double, const Vec2& y) {
    if (!(y[0].imag() > 0.0)) throw NumericalError("kernel characteristic left the upper half-plane");
    return true;
  };
  Vec2 y(z1, cplx(1.0));
  dopri45(rhs, y, t1, prob.t2, prob.ode, obs);
  return y;
}

void check(const PdeKernelProblem& prob, double t1) {
  if (!prob.field || !prob.potential || !prob.initial) throw ConfigError("pde kernel: field, potential and initial slice required");
  if (t1 < prob.t2) throw ConfigError("pde kernel: t1 ≥ t2 required");
  if (prob.eps.size() != 2 || !(prob.eps[0] > prob.eps[1] && prob.eps[1] > 0.0))
    throw ConfigError("pde kernel: two decreasing positive eps values required");
}

cplx evolve_at(const PdeKernelProblem& prob, double t1, double x1) {
  cplx g[2];
  for (int k = 0; k < 2; ++k) {
    const Vec2 y = pull_back(prob, t1, cplx(x1, prob.eps[k]));
    g[k] = prob.initial(y[0]) * y[1];
  }
  // linear Richardson in eps
  const double e0 = prob.eps[0], e1 = prob.eps[1];
  return (e0 * g[1] - e1 * g[0]) / (e0 - e1);
}

}  // namespace

std::vector<cplx> pde_evolve_kernel(const PdeKernelProblem& prob, double t1, const std::vector<double>& x1s) {
  check(prob, t1);
  std::vector<cplx> out;
  out.reserve(x1s.size());
  for (double x : x1s) out.push_back(evolve_at(prob, t1, x));
  return out;
}

double pde_weak_residual(const PdeKernelProblem& prob, double t1, const std::function<double(double)>& f,
                         const std::function<double(double)>& fprime, double a, double b, double dt) {
  check(prob, t1 - dt);
  using boost::math::quadrature::gauss;
  const auto& nodes = gauss<double, 30>::abscissa();
  const auto& weights = gauss<double, 30>::weights();
  std::vector<double> xs, ws;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (size_t k = 0; k < nodes.size(); ++k) {
    xs.push_back(mid + half * nodes[k]);
    ws.push_back(half * weights[k]);
    if (nodes[k] != 0.0) {
      xs.push_back(mid - half * nodes[k]);
      ws.push_back(half * weights[k]);
    }
  }
  auto pairing = [&](double t) {
    auto g = pde_evolve_kernel(prob, t, xs);
    cplx s = 0.0;
    for (size_t k = 0; k < xs.size(); ++k) s += ws[k] * f(xs[k]) * g[k];
    return s;
  };
  const cplx lhs = (pairing(t1 + dt) - pairing(t1 - dt)) / (2.0 * dt);

  const double e0 = prob.eps[0], e1 = prob.eps[1];
  auto v_axis = [&](double x) {
    auto v = [&](double e) { return 0.5 * prob.beta * prob.field->u(t1, cplx(x, e)) + prob.potential->eval(x, 1); };
    return (e0 * v(e1) - e1 * v(e0)) / (e0 - e1);
  };
  auto g1 = pde_evolve_kernel(prob, t1, xs);
  cplx rhs = 0.0;
  for (size_t k = 0; k < xs.size(); ++k) rhs -= ws[k] * fprime(xs[k]) * v_axis(xs[k]) * g1[k];
  auto ends = pde_evolve_kernel(prob, t1, {a, b});
  rhs += f(b) * v_axis(b) * ends[1] - f(a) * v_axis(a) * ends[0];
  return std::abs(lhs - rhs);
}

}  // namespace loggas
