#include "loggas/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "loggas/acceptance.hpp"
#include "loggas/fluctuation.hpp"
#include "loggas/hydro.hpp"
#include "loggas/io.hpp"
#include "loggas/ou.hpp"
#include "loggas/scenario.hpp"
#include "loggas/sde.hpp"
#include "loggas/support.hpp"

namespace loggas {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string scenario;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  std::string format = "csv";
  std::string method = "gmap";
  std::vector<int> only;
};

struct Context {
  Scenario sc;
  fs::path out;
  int workers = 1;
  bool json = false;

  // path of a table; with --format json the CSV is converted once written
  std::string table(const std::string& stem) const { return (out / (stem + ".csv")).string(); }
  void finish(const std::string& stem) const {
    if (!json) return;
    csv_to_json(table(stem), (out / (stem + ".json")).string());
    fs::remove(table(stem));
  }
};

Context make_context(const Common& c, bool scenario_required = true) {
  Context ctx;
  if (!c.scenario.empty()) ctx.sc = load_scenario(c.scenario);
  else if (scenario_required) throw ConfigError("--scenario is required");
  if (c.seed_set) ctx.sc.seed = c.seed;
  ctx.out = c.out.empty() ? fs::path(ctx.sc.output) : fs::path(c.out);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  ctx.workers = c.workers > 0 ? c.workers : static_cast<int>(hw);
  if (c.format != "csv" && c.format != "json") throw ConfigError("--format must be csv or json");
  ctx.json = c.format == "json";
  fs::create_directories(ctx.out);
  log(LogLevel::Info, "output directory " + ctx.out.string() + ", workers " + std::to_string(ctx.workers));
  return ctx;
}

HydroProblem hydro_problem(const Scenario& sc) {
  HydroProblem pr;
  pr.potential = sc.make_potential();
  pr.beta = sc.beta;
  pr.initial = sc.make_initial();
  pr.ode = {sc.tol.ode_atol, sc.tol.ode_rtol};
  pr.plemelj_eps = sc.tol.plemelj_eps;
  return pr;
}

int cmd_simulate_sde(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  McConfig cfg;
  cfg.potential = sc.make_potential();
  cfg.beta = sc.beta;
  cfg.N = sc.N;
  cfg.dt = sc.dt;
  cfg.seed = sc.seed;
  cfg.workers = ctx.workers;
  const bool equilibrium = sc.initial == InitialKind::Equilibrium || sc.initial == InitialKind::QuarticEquilibrium;
  if (equilibrium && cfg.potential->is_harmonic()) {
    cfg.placement = Placement::BetaHermite;
  } else {
    cfg.placement = Placement::Quantile;
    cfg.initial = sc.make_initial();
  }
  cfg.reference = sc.make_initial();

  std::vector<double> times{0.0};
  for (double t : sc.times()) times.push_back(t);

  // replica 0 path
  std::vector<ParticleState> path;
  {
    ParticleState s = cfg.placement == Placement::BetaHermite
                          ? beta_hermite_state(sc.N, sc.beta, cfg.potential->harmonic_kappa(), sc.seed, 0)
                          : quantile_state(*cfg.initial, sc.N);
    s.seed = sc.seed;
    path.push_back(s);
    for (double t : sc.times()) {
      while (s.t < t - 1e-12) s = step(s, std::min(sc.dt, t - s.t), *cfg.potential, sc.beta);
      path.push_back(s);
    }
  }
  write_trajectory_csv(ctx.table("trajectory"), path);
  ctx.finish("trajectory");

  const std::vector<TestFunction> fs{[](double x) { return x; }, [](double x) { return x * x; }};
  const char* names[] = {"x", "x2"};
  auto samples = sample_linear_statistics(cfg, fs, times, sc.replicas);
  log(LogLevel::Info, "sde: " + std::to_string(samples.stats.steps) + " steps, " +
                          std::to_string(samples.stats.rejections) + " bridge refinements");
  {
    std::ofstream os(ctx.table("linear_stats"));
    os << std::setprecision(17) << "replica,t,f,value\n";
    for (int r = 0; r < samples.replicas; ++r)
      for (size_t k = 0; k < times.size(); ++k)
        for (int j = 0; j < 2; ++j)
          os << r << ',' << times[k] << ',' << names[j] << ',' << samples.samples[r][k * 2 + j] << '\n';
  }
  ctx.finish("linear_stats");
  {
    std::ofstream os(ctx.table("covariance"));
    os << std::setprecision(17) << "t1,t2,f,g,estimate,standard_error,replicas\n";
    for (size_t k = 0; k < times.size(); ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          auto e = jackknife_covariance(samples.column(0, i), samples.column(static_cast<int>(k), j));
          os << times[0] << ',' << times[k] << ',' << names[i] << ',' << names[j] << ',' << e.estimate << ','
             << e.standard_error << ',' << e.replicas << '\n';
        }
  }
  ctx.finish("covariance");
  return 0;
}

int cmd_solve_hydro(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  auto prob = hydro_problem(sc);
  auto f = HydroField::solve(prob, sc.times());
  f.write_snapshots_csv(ctx.table("snapshots"));
  ctx.finish("snapshots");
  const double a = std::max(std::abs(prob.initial->lower()), prob.initial->upper());
  std::vector<double> xs;
  for (int i = 0; i <= 200; ++i) xs.push_back(1.5 * a * (-1.0 + 2.0 * i / 200.0));
  f.write_density_csv(ctx.table("density"), xs);
  ctx.finish("density");
  {
    std::ofstream os(ctx.table("moments"));
    os << std::setprecision(17) << "t,k,m\n";
    for (double t : f.times()) {
      auto m = f.moments().at(t);
      for (int k = 0; k <= m.order(); ++k) os << t << ',' << k << ',' << m[k] << '\n';
    }
  }
  ctx.finish("moments");
  return 0;
}

int cmd_track_support(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  auto prob = hydro_problem(sc);
  auto in = SupportInputs::from(prob, sc.horizon);
  in.certified_off_support = prob.initial->analytic();
  EdgeScan scan;
  scan.bisect_tol = sc.tol.edge_bisect;
  auto tr = track_support(sc.times(), in, scan);
  if (!tr.jumps.empty()) log(LogLevel::Warn, std::to_string(tr.jumps.size()) + " edge jumps flagged");
  tr.write_csv(ctx.table("support"));
  ctx.finish("support");
  return 0;
}

KernelMethod parse_method(const std::string& m) {
  if (m == "closed") return KernelMethod::ClosedForm;
  if (m == "gmap") return KernelMethod::GMap;
  if (m == "pde") return KernelMethod::PdeCharacteristics;
  throw ConfigError("--method must be closed, gmap or pde");
}

int cmd_eval_kernel(const Context& ctx, const std::string& method_name) {
  const Scenario& sc = ctx.sc;
  const KernelMethod method = parse_method(method_name);
  auto pot = sc.make_potential();
  const double x2 = sc.kernel.x2;

  // signed values g^{+,+}, g^{+,−} at (t1 = dt, x1; 0, x2)
  std::function<SignedKernel(double, double)> eval;
  std::shared_ptr<GMap> gmap;
  std::shared_ptr<PdeKernelProblem> pde[2];

  if (method == KernelMethod::ClosedForm) {
    if (pot->is_harmonic() && pot->harmonic_kappa() == 1.0 && sc.beta == 2.0) {
      eval = [x2](double dt, double x1) {
        const double a = std::numbers::sqrt2;
        const double th1 = std::acos(x1 / a), th2 = std::acos(x2 / a);
        SignedKernel k;
        k.pp = hermite_lambda(dt, th1, th2, 1, 1);
        k.pm = hermite_lambda(dt, th1, th2, 1, -1);
        k.real = hermite_g(dt, x1, x2);
        return k;
      };
    } else if (auto c = pot->quartic_c()) {
      gmap = std::make_shared<GMap>(GMap::build(sc.make_equilibrium(), pot, sc.beta));
      const double cc = *c;
      eval = [gmap, cc, x2](double dt, double x1) {
        const double a = gmap->half_width();
        if (dt == 0.0) return johansson_equal_time(x1, x2, a, gmap->beta());
        const cplx z1 = quartic_flow_closed_form(a, cc, x1, dt);
        const cplx w = gmap->rho_c(z1) / gmap->density().rho(x1);
        SignedKernel k;
        k.pp = w * johansson_slice(x2, a, gmap->beta(), 1)(z1);
        k.pm = w * johansson_slice(x2, a, gmap->beta(), -1)(z1);
        k.real = combine_signed(k.pp, k.pm);
        return k;
      };
    } else {
      throw ConfigError("closed form needs the Hermite scenario (harmonic, kappa=1, beta=2) or the quartic potential");
    }
  } else if (method == KernelMethod::GMap) {
    gmap = std::make_shared<GMap>(GMap::build(sc.make_equilibrium(), pot, sc.beta));
    eval = [gmap, x2](double dt, double x1) { return stationary_two_time(*gmap, dt, 0.0, x1, x2); };
  } else {
    const bool stationary = sc.initial == InitialKind::Equilibrium || sc.initial == InitialKind::QuarticEquilibrium;
    auto init = sc.make_initial();
    const double a = init->upper();
    if (std::abs(init->lower() + a) > 1e-12 * a) throw ConfigError("pde kernel needs a symmetric initial density");
    std::shared_ptr<const UField> field;
    if (stationary) {
      field = std::make_shared<StationaryField>(init);
    } else {
      double tmax = 0.0;
      for (double d : sc.kernel.dt) tmax = std::max(tmax, d);
      std::vector<double> ts;
      for (int k = 1; k <= 8; ++k) ts.push_back(std::max(tmax, 1e-3) * k / 8.0);
      field = std::make_shared<HydroField>(HydroField::solve(hydro_problem(sc), ts));
    }
    for (int k = 0; k < 2; ++k) {
      pde[k] = std::make_shared<PdeKernelProblem>();
      pde[k]->potential = pot;
      pde[k]->beta = sc.beta;
      pde[k]->field = field;
      pde[k]->initial = johansson_slice(x2, a, sc.beta, k == 0 ? 1 : -1);
      pde[k]->ode = {sc.tol.ode_atol, sc.tol.ode_rtol};
    }
    eval = [pde, a, x2, beta = sc.beta](double dt, double x1) {
      if (dt == 0.0) return johansson_equal_time(x1, x2, a, beta);
      SignedKernel k;
      k.pp = pde_evolve_kernel(*pde[0], dt, {x1})[0];
      k.pm = pde_evolve_kernel(*pde[1], dt, {x1})[0];
      k.real = combine_signed(k.pp, k.pm);
      return k;
    };
  }

  std::vector<KernelValue> out;
  for (double dt : sc.kernel.dt)
    for (double x1 : sc.kernel.x1) {
      if (dt == 0.0 && x1 == x2) {
        log(LogLevel::Warn, "skipping the equal-time diagonal x1 = x2");
        continue;
      }
      SignedKernel k = eval(dt, x1);
      for (int s : {1, -1}) {
        KernelValue v;
        v.t1 = dt;
        v.t2 = 0.0;
        v.x1 = x1;
        v.x2 = x2;
        v.eps1 = 1;
        v.eps2 = s;
        v.value = s > 0 ? k.pp : k.pm;
        v.real_kernel = k.real;
        v.method = method;
        out.push_back(v);
      }
    }
  write_kernel_csv(ctx.table("kernel"), out);
  ctx.finish("kernel");
  std::vector<KernelValue> real;
  for (size_t i = 0; i < out.size(); i += 2) real.push_back(out[i]);
  write_real_kernel_csv(ctx.table("real_kernel"), real);
  ctx.finish("real_kernel");
  return 0;
}

int cmd_identify_ou(const Context& ctx) {
  const Scenario& sc = ctx.sc;
  HermiteModeKernel hk(std::max(8192, 8 * sc.ou.nmax));
  IdentifyOptions io;
  io.nmax = sc.ou.nmax;
  auto spec = identify([&](double dt, int n) { return hk(dt, n); }, io);
  write_spectral_csv(ctx.table("spectral"), spec);
  ctx.finish("spectral");
  std::ostringstream bias;
  bias << std::setprecision(17) << hermite_tail_bias(sc.ou.nmax, sc.ou.dt);
  log(LogLevel::Info, "truncation tail at lag dt: " + bias.str());
  SimulateOptions so;
  so.record_every = sc.ou.record_every;
  auto tr = simulate(spec, sc.ou.t_end, sc.ou.dt, sc.seed, so);
  write_ou_trajectory_csv(ctx.table("ou_trajectory"), tr);
  ctx.finish("ou_trajectory");
  return 0;
}

int cmd_verify(const Context& ctx, bool have_scenario, bool seed_set, const std::vector<int>& only) {
  AcceptanceOptions o;
  o.workers = ctx.workers;
  if (have_scenario || seed_set) o.seed = ctx.sc.seed;
  if (have_scenario) {
    o.mc_N = ctx.sc.N;
    o.mc_replicas = ctx.sc.replicas;
    o.mc_dt = ctx.sc.dt;
  }
  auto rs = run_acceptance(o, only);
  bool ok = !rs.empty();
  for (const auto& r : rs) {
    std::cout << format_line(r) << '\n';
    ok = ok && r.pass();
  }
  write_text((ctx.out / "verify.json").string(), acceptance_report_json(rs));
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"loggas: log-gas dynamics, hydrodynamics and fluctuation kernels"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub, bool scenario_required) {
    auto* opt = sub->add_option("--scenario", c.scenario, "scenario JSON");
    if (scenario_required) opt->required();
    sub->add_option("--out", c.out, "output directory (default: scenario output)");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { c.seed = s, c.seed_set = true; }, "RNG seed override");
    sub->add_option("--workers", c.workers, "worker threads (default: logical cores)");
    sub->add_option("--format", c.format, "table format: csv or json");
  };
  auto* sde = app.add_subcommand("simulate-sde", "finite-N particle system and linear statistics");
  auto* hyd = app.add_subcommand("solve-hydro", "moment ODE and characteristic fan");
  auto* sup = app.add_subcommand("track-support", "support edges over time");
  auto* ker = app.add_subcommand("eval-kernel", "two-time fluctuation kernel");
  auto* ou = app.add_subcommand("identify-ou", "OU modes of the stationary Hermite kernel");
  auto* ver = app.add_subcommand("verify", "acceptance suite with JSON report");
  for (auto* s : {sde, hyd, sup, ker, ou}) add_common(s, true);
  add_common(ver, false);
  ker->add_option("--method", c.method, "closed, gmap or pde");
  ver->add_option("--only", c.only, "criterion ids to run")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (sde->parsed()) return cmd_simulate_sde(make_context(c));
    if (hyd->parsed()) return cmd_solve_hydro(make_context(c));
    if (sup->parsed()) return cmd_track_support(make_context(c));
    if (ker->parsed()) return cmd_eval_kernel(make_context(c), c.method);
    if (ou->parsed()) return cmd_identify_ou(make_context(c));
    if (ver->parsed()) return cmd_verify(make_context(c, false), !c.scenario.empty(), c.seed_set, c.only);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 2;
}

}  // namespace loggas
