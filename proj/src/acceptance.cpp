#include "loggas/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"
#include "loggas/fluctuation.hpp"
#include "loggas/hydro.hpp"
#include "loggas/ou.hpp"
#include "loggas/rng.hpp"
#include "loggas/sde.hpp"
#include "loggas/support.hpp"
#include "loggas/transforms.hpp"

namespace loggas {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Metric at_most(std::string name, double observed, double tol) {
  return {std::move(name), observed, tol, std::isfinite(observed) && observed <= tol};
}

Metric within(std::string name, double observed, double lo, double hi) {
  Metric m{std::move(name), observed, hi, std::isfinite(observed) && observed >= lo && observed <= hi};
  m.two_sided = true;
  m.lower = lo;
  return m;
}

std::shared_ptr<const Potential> harmonic() { return std::make_shared<Potential>(Potential::harmonic(1.0)); }

HydroProblem scaling_problem(double s0) {
  HydroProblem pr;
  pr.potential = harmonic();
  pr.beta = 2.0;
  pr.initial = std::make_shared<SemicircleDensity>(kSqrt2 * s0);
  return pr;
}

// Stieltjes-side error on probes inside the live fan; probes outside the hull are redrawn.
struct ProbeStats {
  double max_err = 0.0;
  int probes = 0, redrawn = 0;
};

ProbeStats probe_scaling(const HydroField& f, double s0, int n, std::mt19937_64& rng) {
  ScalingField exact(s0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& ts = f.times();
  ProbeStats st;
  while (st.probes < n) {
    if (st.redrawn > 100 * n) throw NumericalError("probe placement: fan coverage too small");
    const double t = ts[rng() % ts.size()];
    const cplx z(-1.0 + 2.0 * u(rng), 0.02 + 0.28 * u(rng));
    try {
      const cplx v = f.u(t, z);
      st.max_err = std::max(st.max_err, std::abs(v - exact.u(t, z)));
      ++st.probes;
    } catch (const NumericalError&) {
      ++st.redrawn;
    }
  }
  return st;
}

}  // namespace

bool CheckResult::pass() const {
  for (const auto& m : metrics)
    if (!m.pass) return false;
  return !metrics.empty();
}

CheckResult check_hydro_scaling(const AcceptanceOptions& o) {
  CheckResult r{1, "scaling-solution hydrodynamics", {}, 0.0, ""};
  const auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed);
  double err = 0.0;
  int redrawn = 0;
  for (double s0 : {0.5, 2.0}) {
    auto f = HydroField::solve(scaling_problem(s0), {0.2, 0.4, 0.6, 0.8, 1.0});
    auto st = probe_scaling(f, s0, 25, rng);
    err = std::max(err, st.max_err);
    redrawn += st.redrawn;
  }
  r.seconds = since(t0);
  r.metrics.push_back(at_most("max |U - U_eq(z/s)/s| over 50 probes", err, 1e-6));
  r.metrics.push_back(at_most("runtime [s]", r.seconds, 30.0));
  r.note = "s0 in {0.5, 2}; " + std::to_string(redrawn) + " probes redrawn outside the fan hull";
  return r;
}

CheckResult check_support_edge(const AcceptanceOptions&) {
  CheckResult r{2, "support edge tracking", {}, 0.0, ""};
  const auto t0 = Clock::now();
  double eb = 0.0, ec = 0.0;
  size_t jumps = 0;
  for (double s0 : {0.5, 2.0}) {
    std::vector<double> ts;
    for (int k = 1; k <= 20; ++k) ts.push_back(0.1 * k);
    auto in = SupportInputs::from(scaling_problem(s0), 2.0);
    auto tr = track_support(ts, in);
    const double b0 = kSqrt2 * s0;
    for (size_t k = 0; k < ts.size(); ++k) {
      eb = std::max(eb, std::abs(tr.b[k] - kSqrt2 * scaling_solution(s0, ts[k])));
      const double x = tr.b_star[k];
      const double lhs = x / std::sqrt(x * x - b0 * b0) - 1.0;
      const double rhs = 0.5 * b0 * b0 * (1.0 / std::tanh(ts[k]) - 1.0);
      ec = std::max(ec, std::abs(lhs - rhs));
    }
    jumps += tr.jumps.size();
  }
  r.seconds = since(t0);
  r.metrics.push_back(at_most("max |b_t - sqrt2 s(t)| at 20 times", eb, 1e-4));
  r.metrics.push_back(at_most("max coth identity residual at b*", ec, 1e-8));
  r.metrics.push_back(at_most("runtime [s]", r.seconds, 60.0));
  r.note = "s0 in {0.5, 2}; " + std::to_string(jumps) + " edge jumps flagged";
  return r;
}

CheckResult check_harmonic_characteristics(const AcceptanceOptions& o) {
  CheckResult r{3, "harmonic characteristics closed form", {}, 0.0, ""};
  const auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 3);
  std::uniform_real_distribution<double> re(-2.0, 2.0), im(0.05, 2.0), tt(0.0, 2.0);
  auto p = harmonic();
  auto rho0 = std::make_shared<SemicircleDensity>(1.0);
  InitialSlice u0 = InitialSlice::from(rho0);
  FlowOptions fo;
  fo.ode = {1e-13, 1e-12};
  fo.kill = false;
  double err = 0.0;
  for (double beta : {1.0, 2.0, 4.0}) {
    MomentClosure cl;
    auto T = MomentTrajectory::solve(*p, beta, rho0->moments(cl.K + closure_margin(*p)), cl, 2.0, fo.ode);
    for (int k = 0; k < 100; ++k) {
      const cplx z0(re(rng), im(rng));
      const double t = tt(rng);
      CharState s = propagate(launch(z0, 0.0, u0, *p, beta), t, *p, beta, T, fo);
      const cplx exact = z0 * std::exp(-t) - 0.5 * beta * rho0->stieltjes(z0) * std::sinh(t);
      err = std::max(err, std::abs(s.z - exact));
    }
  }
  r.seconds = since(t0);
  r.metrics.push_back(at_most("max |Z_t - closed form| over 3x100 draws", err, 1e-9));
  r.note = "beta in {1, 2, 4}; semicircle R=1 initial data";
  return r;
}

CheckResult check_hermite_triangle(const AcceptanceOptions& o) {
  CheckResult r{4, "Hermite kernel consistency", {}, 0.0, ""};
  const auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 4);
  std::uniform_real_distribution<double> ux(-1.3, 1.3), udt(0.0, 2.0);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  double tri = 0.0, gm = 0.0, pde = 0.0;
  auto eq = std::make_shared<SemicircleDensity>(kSqrt2);
  auto p = harmonic();
  GMap g = GMap::build(eq, p, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double x1 = ux(rng), x2 = ux(rng), dt = udt(rng);
    const double th1 = std::acos(x1 / kSqrt2), th2 = std::acos(x2 / kSqrt2);
    auto lam = [&](double d) {
      return combine_signed(hermite_lambda(d, th1, th2, 1, 1), hermite_lambda(d, th1, th2, 1, -1));
    };
    const double gd = hermite_g(dt, x1, x2);
    tri = std::max(tri, rel(lam(dt), gd));
    const double l0 = lam(0.0), g0 = hermite_g(0.0, x1, x2), e0 = hermite_equal_time(x1, x2);
    tri = std::max({tri, rel(l0, g0), rel(g0, e0), rel(l0, e0)});
    gm = std::max(gm, rel(stationary_two_time_g(g, dt, 0.0, x1, x2), gd));
  }
  PdeKernelProblem pr;
  pr.potential = p;
  pr.beta = 2.0;
  pr.field = std::make_shared<StationaryField>(eq);
  const std::vector<double> xs{-1.0, -0.4, 0.1, 0.6, 1.1};
  for (double x2 : {-0.7, 0.3}) {
    for (double dt : {0.3, 1.0}) {
      pr.initial = johansson_slice(x2, kSqrt2, 2.0, +1);
      auto gpp = pde_evolve_kernel(pr, dt, xs);
      pr.initial = johansson_slice(x2, kSqrt2, 2.0, -1);
      auto gpm = pde_evolve_kernel(pr, dt, xs);
      for (size_t i = 0; i < xs.size(); ++i) pde = std::max(pde, rel(combine_signed(gpp[i], gpm[i]), hermite_g(dt, xs[i], x2)));
    }
  }
  r.seconds = since(t0);
  r.metrics.push_back(at_most("lambda / g / equal-time pairwise (100 pts)", tri, 1e-12));
  r.metrics.push_back(at_most("G-map vs hermite_g (100 pts)", gm, 1e-8));
  r.metrics.push_back(at_most("PDE characteristics vs hermite_g (20 pts)", pde, 1e-6));
  r.note = "errors relative to max(1, |g|)";
  return r;
}

CheckResult check_quartic_flow(const AcceptanceOptions& o) {
  CheckResult r{5, "quartic continuation flow", {}, 0.0, ""};
  const auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 5);
  double ez = 0.0, res = 0.0;
  for (double c : {0.0, 1.0}) {
    auto eq = std::make_shared<QuarticEquilibrium>(c, 2.0);
    GMap g = GMap::build(eq, std::make_shared<Potential>(Potential::quartic(c)), 2.0);
    const double A = eq->half_width();
    const double tau = 1.0 / std::sqrt((1.5 * A * A + c) * (0.5 * A * A + c));
    std::uniform_real_distribution<double> ux(0.05 * A, 0.95 * A), ut(0.0, 0.5 * tau);
    for (int k = 0; k < 50; ++k) {
      const double x1 = (k % 2 ? 1.0 : -1.0) * ux(rng), t = ut(rng);
      auto f = continuation_flow(g, x1, t);
      ez = std::max(ez, std::abs(f.z - quartic_flow_closed_form(A, c, x1, t)));
      res = std::max(res, f.residual);
    }
  }
  r.seconds = since(t0);
  r.metrics.push_back(at_most("max |endpoint - closed form| (2x50 draws)", ez, 1e-8));
  r.metrics.push_back(at_most("max |G(z) - G(x1) - i pi t|", res, 1e-8));
  r.note = "beta=2, c in {0, 1}, |x1| in [0.05A, 0.95A], t <= tau/2";
  return r;
}

CheckResult check_monte_carlo(const AcceptanceOptions& o) {
  CheckResult r{6, "Monte Carlo vs kernel quadrature", {}, 0.0, ""};
  const auto t0 = Clock::now();
  auto p = harmonic();
  auto eq = std::make_shared<SemicircleDensity>(kSqrt2);
  McConfig cfg;
  cfg.potential = p;
  cfg.beta = 2.0;
  cfg.N = o.mc_N;
  cfg.dt = o.mc_dt;
  cfg.placement = Placement::BetaHermite;
  cfg.reference = eq;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  const std::vector<TestFunction> fs{[](double x) { return x; }, [](double x) { return x * x; }};
  const char* names[] = {"x", "x^2"};
  auto samples = sample_linear_statistics(cfg, fs, {0.0, 0.5}, o.mc_replicas);
  std::ostringstream note;
  note << std::setprecision(6);
  for (double dt : {0.0, 0.5}) {
    auto K = [dt](double a, double b) { return hermite_g(dt, a, b); };
    for (auto [i, j] : {std::pair{0, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
      const double theory = kernel_pairing(K, fs[i], fs[j], kSqrt2);
      auto est = jackknife_covariance(samples.column(0, i), samples.column(dt > 0.0 ? 1 : 0, j));
      const double z = std::abs(est.estimate - theory) / est.standard_error;
      std::string name = std::string("|cov(") + names[i] + "," + names[j] + ") - theory|/SE at dt=" + (dt > 0 ? "0.5" : "0");
      r.metrics.push_back(at_most(name, z, 3.0));
      note << names[i] << "," << names[j] << "@" << dt << ": mc " << est.estimate << " +- " << est.standard_error
           << " theory " << theory << "; ";
    }
  }
  r.seconds = since(t0);
  r.metrics.push_back(at_most("runtime [s]", r.seconds, 600.0));
  note << "N=" << o.mc_N << " replicas=" << o.mc_replicas << " dt=" << o.mc_dt << " workers=" << o.workers
       << " bridge refinements=" << samples.stats.rejections;
  r.note = note.str();
  return r;
}

CheckResult check_short_distance(const AcceptanceOptions& o) {
  CheckResult r{7, "short-distance law", {}, 0.0, ""};
  const auto t0 = Clock::now();
  std::mt19937_64 rng(o.seed + 7);
  std::uniform_real_distribution<double> ux(-1.0, 1.0), ud(0.2, 1.0), u01(0.0, 1.0);
  const double eps = 1e-3;
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < 20; ++k) {
    const double x = ux(rng), dx = (k % 2 ? 1.0 : -1.0) * ud(rng);
    const double rho = std::sqrt(2.0 - x * x) / kPi;
    // Re (δx + iπρδt)⁻² vanishes at πρ|δt| = |δx|; stay well inside
    const double dt = u01(rng) * 0.5 * std::abs(dx) / (kPi * rho);
    const double ratio = hermite_g(eps * dt, x + eps * dx, x) / short_distance(x, rho, dx, dt, eps);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  r.seconds = since(t0);
  r.metrics.push_back(within("min ratio", lo, 0.98, 1.02));
  r.metrics.push_back(within("max ratio", hi, 0.98, 1.02));
  r.note = "eps=1e-3, 20 draws with pi rho |dt| <= |dx|/2";
  return r;
}

CheckResult check_ou(const AcceptanceOptions& o) {
  CheckResult r{8, "OU identification and simulation", {}, 0.0, ""};
  const auto t0 = Clock::now();
  HermiteModeKernel hk(8192);
  IdentifyOptions io;
  io.nmax = 32;
  auto spec = identify([&](double dt, int n) { return hk(dt, n); }, io);
  double ea = 0.0, ek = 0.0;
  for (size_t j = 0; j < spec.size(); ++j) {
    const int n = spec.modes[j];
    ea = std::max(ea, std::abs(spec.drift[j] - n));
    ek = std::max(ek, std::abs(spec.stationary_cov[j] - n / (2.0 * kPi * kPi)));
  }
  r.metrics.push_back(at_most("max |A(n) - |n||, n<=32", ea, 1e-5));
  r.metrics.push_back(at_most("max |K(n) - |n|/2pi^2|, n<=32", ek, 1e-10));

  const int R = 4000;
  const double dt = 0.01, lag = 0.1;
  const size_t J = spec.size();
  std::vector<RunningMoments> prod(J);
  for (int rep = 0; rep < R; ++rep) {
    SimulateOptions so;
    so.replica = static_cast<std::uint64_t>(rep);
    auto tr = simulate(spec, lag, dt, o.seed + 8, so);
    for (size_t j = 0; j < J; ++j) prod[j].push(tr.values.front()[j] * tr.values.back()[j]);
  }
  double zmax = 0.0;
  for (size_t j = 0; j < J; ++j) {
    const double target = std::exp(-spec.modes[j] * lag) * spec.stationary_cov[j];
    const double se = std::sqrt(prod[j].variance() / R);
    zmax = std::max(zmax, std::abs(prod[j].mean - target) / se);
  }
  r.metrics.push_back(at_most("max |lag cov - e^{-n dt} K(n)|/SE", zmax, 3.0));
  r.seconds = since(t0);
  r.note = "lag 0.1, step 0.01, 4000 replicas, 32 modes";
  return r;
}

CheckResult check_transforms(const AcceptanceOptions&) {
  CheckResult r{9, "transform toolbox", {}, 0.0, ""};
  const auto t0 = Clock::now();
  {
    GridFunction g;
    const int n = 4096;
    for (int i = 0; i < n; ++i) {
      const double x = -10.0 + 20.0 * i / (n - 1);
      g.xs.push_back(x);
      g.values.push_back(std::cos(12.0 * x) * std::exp(-x * x));
    }
    auto hh = hilbert_line(hilbert_line(g));
    double e = 0.0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(hh.values[i] + g.values[i]));
    r.metrics.push_back(at_most("H^2 f + f, f = cos(12x) exp(-x^2)", e, 1e-6));
  }
  double cut = 0.0;
  auto cut_residual = [&](const Density& rho, const Potential& p, double beta) {
    const int n = 1 << 18;
    const double a = rho.upper(), L = 2.0 * a;
    GridFunction g;
    for (int i = 0; i < n; ++i) {
      const double x = -L + 2.0 * L * i / (n - 1);
      g.xs.push_back(x);
      g.values.push_back(std::abs(x) < a ? rho.rho(x) : 0.0);
    }
    auto h = hilbert_line(g);
    for (int i = 0; i < n; ++i)
      if (std::abs(g.xs[i]) < 0.9 * a) cut = std::max(cut, std::abs(0.5 * beta * kPi * h.values[i] - p.eval(g.xs[i], 1)));
  };
  cut_residual(SemicircleDensity(kSqrt2), Potential::harmonic(1.0), 2.0);
  cut_residual(QuarticEquilibrium(0.0, 2.0), Potential::quartic(0.0), 2.0);
  r.metrics.push_back(at_most("cut equation residual, |x| < 0.9A", cut, 1e-6));
  {
    SemicircleDensity sc(kSqrt2);
    double e = 0.0;
    for (int i = 1; i < 200; ++i) {
      const double x = kSqrt2 * (-1.0 + 2.0 * i / 200.0);
      auto v = plemelj_density([&](double eps) { return sc.stieltjes(cplx(x, eps)); }, 1e-4,
                               std::pair{-kSqrt2, kSqrt2}, x);
      e = std::max(e, std::abs(v.rho - sc.rho(x)));
    }
    r.metrics.push_back(at_most("Plemelj reconstruction of the semicircle", e, 1e-4));
  }
  r.seconds = since(t0);
  r.note = "cut residual over harmonic and quartic (c=0) equilibria, 2^18-point grid on [-2A, 2A]";
  return r;
}

CheckResult check_properties(const AcceptanceOptions& o) {
  CheckResult r{10, "property suites", {}, 0.0, ""};
  const auto t0 = Clock::now();
  double herglotz = 0.0, mass = 0.0;
  long live = 0;
  std::vector<HydroProblem> probs{scaling_problem(0.5), scaling_problem(2.0)};
  {
    HydroProblem q;
    q.potential = std::make_shared<Potential>(Potential::quartic(0.0));
    q.beta = 1.0;
    q.initial = std::make_shared<SemicircleDensity>(1.0);
    probs.push_back(q);
  }
  for (const auto& pr : probs) {
    auto f = HydroField::solve(pr, {0.25, 0.5, 0.75, 1.0});
    for (size_t k = 0; k < f.times().size(); ++k)
      for (const auto& s : f.snapshot(k))
        if (s.alive && s.z.imag() > 0.0) {
          herglotz = std::max(herglotz, std::max(0.0, s.c.imag()));  // Im U = −Im C ≥ 0
          ++live;
        }
    for (int k = 0; k <= 100; ++k) mass = std::max(mass, std::abs(f.moments().at(0.01 * k)[0] - 1.0));
  }
  r.metrics.push_back(at_most("max Herglotz violation (Im U < 0) on live characteristics", herglotz, 0.0));
  r.metrics.push_back(at_most("max |m0 - 1| in the moment solve", mass, 1e-12));

  long unresolved = 0, refinements = 0, disordered = 0;
  for (double beta : {1.0, 2.0, 4.0}) {
    for (int N : {50, 500}) {
      auto p = harmonic();
      auto eq = equilibrium_density(*p, beta);
      ParticleState s = quantile_state(*eq, N);
      s.seed = o.seed + 10;
      StepStats st;
      const int steps = N > 100 ? 40 : 400;
      try {
        for (int k = 0; k < steps; ++k) {
          s = step(s, 5e-3, *p, beta, {}, &st);
          if (!s.ordered()) ++disordered;
        }
      } catch (const NumericalError&) {
        ++unresolved;
      }
      refinements += st.rejections;
    }
  }
  r.metrics.push_back(at_most("unresolved SDE collisions (beta in {1,2,4}, N in {50,500})", double(unresolved), 0.0));
  r.metrics.push_back(at_most("ordering violations", double(disordered), 0.0));
  r.seconds = since(t0);
  r.note = std::to_string(live) + " live characteristics checked; " + std::to_string(refinements) +
           " bridge refinements in the SDE runs";
  return r;
}

std::vector<CheckResult> run_acceptance(const AcceptanceOptions& o, const std::vector<int>& which) {
  using Fn = CheckResult (*)(const AcceptanceOptions&);
  const Fn all[] = {check_hydro_scaling, check_support_edge, check_harmonic_characteristics, check_hermite_triangle,
                    check_quartic_flow, check_monte_carlo, check_short_distance, check_ou,
                    check_transforms, check_properties};
  std::vector<CheckResult> out;
  for (int id = 1; id <= 10; ++id) {
    if (!which.empty() && std::find(which.begin(), which.end(), id) == which.end()) continue;
    try {
      out.push_back(all[id - 1](o));
    } catch (const std::exception& e) {
      CheckResult r{id, "criterion " + std::to_string(id), {}, 0.0, std::string("error: ") + e.what()};
      r.metrics.push_back({"completed", 0.0, 1.0, false});
      out.push_back(r);
    }
  }
  return out;
}

std::string format_line(const CheckResult& r) {
  std::ostringstream os;
  os << std::setprecision(3) << (r.pass() ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ":";
  for (const auto& m : r.metrics) {
    os << "  " << m.name << " = " << m.observed;
    if (m.two_sided) os << " (in [" << m.lower << ", " << m.tolerance << "])";
    else os << " (<= " << m.tolerance << ")";
  }
  os << "  (" << std::setprecision(3) << r.seconds << " s)";
  if (!r.note.empty()) os << "\n        " << r.note;
  return os.str();
}

std::string acceptance_report_json(const std::vector<CheckResult>& rs) {
  nlohmann::json j;
  j["schema"] = "loggas-verify/1";
  bool ok = !rs.empty();
  for (const auto& r : rs) {
    nlohmann::json c;
    c["id"] = r.id;
    c["name"] = r.name;
    c["pass"] = r.pass();
    c["seconds"] = r.seconds;
    c["note"] = r.note;
    for (const auto& m : r.metrics) {
      nlohmann::json mj{{"name", m.name}, {"observed", m.observed}, {"tolerance", m.tolerance}, {"pass", m.pass}};
      if (m.two_sided) mj["lower"] = m.lower;
      c["metrics"].push_back(mj);
    }
    ok = ok && r.pass();
    j["checks"].push_back(c);
  }
  j["pass"] = ok;
  return j.dump(2);
}

}  // namespace loggas
