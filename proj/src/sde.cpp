#include "loggas/sde.hpp"

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

#include "loggas/rng.hpp"

namespace loggas {

namespace {

constexpr std::uint64_t kBridgeTag = 1ULL << 62;

// Neumaier-compensated sum
struct Kahan {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

// x += y, with compensation c (classic Kahan, packetwise)
template <class A, class B, class Y>
inline void kahan_add(A&& x, B&& c, const Y& y) {
  const Eigen::Array4d u = y - c;
  const Eigen::Array4d t = x + u;
  c = (t - x) - u;
  x = t;
}

bool gaps_resolved(const std::vector<double>& before, const std::vector<double>& after, double shrink) {
  for (size_t i = 1; i < after.size(); ++i)
    if (!(after[i] - after[i - 1] > shrink * (before[i] - before[i - 1]))) return false;
  for (double x : after)
    if (!std::isfinite(x)) return false;
  return true;
}

bool strictly_increasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

struct Stepper {
  const Potential& p;
  double beta;
  const StepOptions& opt;
  std::uint64_t stream;  // hash of (seed, replica)
  std::uint64_t step_index;
  StepStats* stats;
  double inv_sqrt_n;

  // Semi-implicit Euler: nearest-neighbour repulsion at the new state, the rest
  // explicit. y minimizes ½|y − x0|² − dt·k Σ log(y_{i+1} − y_i), strictly
  // convex with a tridiagonal Hessian; the barrier keeps y ordered.
  void implicit(std::vector<double>& lam, double dt, const std::vector<double>& dw, const std::vector<double>& b) const {
    const size_t n = lam.size();
    const double k = beta / (2.0 * static_cast<double>(n));
    std::vector<double> x0(n), y(lam), g(n), diag(n), off(n > 0 ? n - 1 : 0), step(n), trial(n);
    for (size_t i = 0; i < n; ++i) {
      double near = 0.0;
      if (i > 0) near += k / (lam[i] - lam[i - 1]);
      if (i + 1 < n) near -= k / (lam[i + 1] - lam[i]);
      x0[i] = lam[i] + inv_sqrt_n * dw[i] + dt * (b[i] - near);
    }
    auto phi = [&](const std::vector<double>& v) {
      double f = 0.0;
      for (size_t i = 0; i < n; ++i) f += 0.5 * (v[i] - x0[i]) * (v[i] - x0[i]);
      for (size_t i = 1; i < n; ++i) f -= dt * k * std::log(v[i] - v[i - 1]);
      return f;
    };
    double f = phi(y);
    for (int it = 0; it < 200; ++it) {
      for (size_t i = 0; i < n; ++i) {
        g[i] = y[i] - x0[i];
        diag[i] = 1.0;
      }
      for (size_t i = 1; i < n; ++i) {
        const double d = y[i] - y[i - 1], h = dt * k / (d * d);
        g[i - 1] += dt * k / d;
        g[i] -= dt * k / d;
        diag[i - 1] += h;
        diag[i] += h;
        off[i - 1] = -h;
      }
      // Thomas solve of H step = −g
      std::vector<double> c(off), r(n);
      for (size_t i = 0; i < n; ++i) r[i] = -g[i];
      std::vector<double> dd(diag);
      for (size_t i = 1; i < n; ++i) {
        const double m = off[i - 1] / dd[i - 1];
        dd[i] -= m * c[i - 1];
        r[i] -= m * r[i - 1];
      }
      step[n - 1] = r[n - 1] / dd[n - 1];
      for (size_t i = n - 1; i-- > 0;) step[i] = (r[i] - c[i] * step[i + 1]) / dd[i];
      double dec = 0.0;
      bool tiny = true;
      for (size_t i = 0; i < n; ++i) {
        dec -= g[i] * step[i];
        tiny = tiny && std::abs(step[i]) <= 1e-15 * (1.0 + std::abs(y[i]));
      }
      // past this point phi differences are roundoff
      if (tiny || dec < 1e-26) break;
      double a = 1.0;
      for (;; a *= 0.5) {
        if (a < 1e-20) throw NumericalError("collision unresolved: implicit step stalled");
        for (size_t i = 0; i < n; ++i) trial[i] = y[i] + a * step[i];
        if (!strictly_increasing(trial)) continue;
        const double ft = phi(trial);
        if (ft <= f - 0.25 * a * dec || (a == 1.0 && dec < 1e-12)) {
          f = ft;
          break;
        }
      }
      y.swap(trial);
    }
    lam.swap(y);
  }

  // b: drift at lam when the caller already has it
  void advance(std::vector<double>& lam, double dt, const std::vector<double>& dw, std::uint64_t node, int depth,
               std::vector<double> b = {}) {
    if (b.empty()) b = drift(lam, p, beta);
    std::vector<double> cand(lam.size());
    for (size_t i = 0; i < lam.size(); ++i) cand[i] = lam[i] + inv_sqrt_n * dw[i] + dt * b[i];
    if (gaps_resolved(lam, cand, opt.gap_shrink)) {
      lam.swap(cand);
      if (stats) stats->max_depth = std::max(stats->max_depth, depth);
      return;
    }
    if (stats) ++stats->rejections;
    const double half = 0.5 * dt;
    if (depth >= opt.implicit_depth || half < opt.dt_min) {
      implicit(lam, dt, dw, b);
      if (stats) {
        ++stats->implicit_steps;
        stats->max_depth = std::max(stats->max_depth, depth);
      }
      return;
    }
    // Brownian bridge midpoint: W(dt/2) | W(dt) ~ N(W(dt)/2, dt/4)
    CounterRng rng(stream, step_index, kBridgeTag | node);
    std::vector<double> w1(dw.size()), w2(dw.size());
    const double sd = opt.noise ? std::sqrt(0.25 * dt) : 0.0;
    for (size_t i = 0; i < dw.size(); ++i) {
      w1[i] = 0.5 * dw[i] + sd * rng.normal();
      w2[i] = dw[i] - w1[i];
    }
    advance(lam, half, w1, 2 * node, depth + 1, std::move(b));
    advance(lam, half, w2, 2 * node + 1, depth + 1);
  }
};

}  // namespace

bool ParticleState::ordered() const { return strictly_increasing(lambdas); }

std::vector<double> drift(const std::vector<double>& lam, const Potential& p, double beta) {
  const size_t n = lam.size();
  const auto& a = p.dcoeffs();
  const double k = beta / (2.0 * static_cast<double>(n));
  // row i adds its pairs j > i to itself and subtracts them from the column sums S[j]
  std::vector<double> S(n, 0.0), C(n, 0.0), b(n);
  using P = Eigen::Array4d;
  for (size_t i = 0; i < n; ++i) {
    P s = P::Zero(), c = P::Zero();
    const double li = lam[i];
    size_t j = i + 1;
    for (; j + 4 <= n; j += 4) {
      const P d = 1.0 / (li - Eigen::Map<const P>(lam.data() + j));
      kahan_add(s, c, d);
      kahan_add(Eigen::Map<P>(S.data() + j), Eigen::Map<P>(C.data() + j), -d);
    }
    Kahan acc;
    for (; j < n; ++j) {
      const double d = 1.0 / (li - lam[j]);
      acc.add(d);
      const double u = -d - C[j], t = S[j] + u;
      C[j] = (t - S[j]) - u;
      S[j] = t;
    }
    acc.add(S[i]);
    acc.add(-C[i]);
    for (int l = 0; l < 4; ++l) {
      acc.add(s[l]);
      acc.add(-c[l]);
    }
    b[i] = k * acc.value() - horner(a, lam[i]);
  }
  return b;
}

ParticleState step(const ParticleState& s, double dt, const Potential& p, double beta, const StepOptions& opt,
                   StepStats* stats) {
  if (!(dt > 0.0)) throw ConfigError("step: dt must be > 0");
  if (!s.ordered()) throw NumericalError("step: state not strictly ordered");
  const size_t n = s.lambdas.size();
  Stepper st{p, beta, opt, hash_combine(s.seed, s.replica), s.step_index, stats,
             1.0 / std::sqrt(static_cast<double>(n))};
  std::vector<double> dw(n, 0.0);
  if (opt.noise) {
    CounterRng rng(st.stream, s.step_index, 1);
    const double sd = std::sqrt(dt);
    for (auto& w : dw) w = sd * rng.normal();
  }
  ParticleState out = s;
  st.advance(out.lambdas, dt, dw, 1, 0);
  out.t = s.t + dt;
  out.step_index = s.step_index + 1;
  if (stats) ++stats->steps;
  double m = std::max(std::abs(out.lambdas.front()), std::abs(out.lambdas.back()));
  if (m > opt.radius) {
    std::ostringstream os;
    os << "particle left the large-deviation radius: max|lambda|=" << m << " > R=" << opt.radius
       << " (replica " << s.replica << ", t=" << out.t << ")";
    throw NumericalError(os.str());
  }
  return out;
}

ParticleState drift_flow(const ParticleState& s, double t_end, const Potential& p, double beta,
                         const OdeOptions& opt) {
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(s.lambdas.data(), s.size());
  auto rhs = [&](double, const Eigen::VectorXd& v) {
    std::vector<double> lam(v.data(), v.data() + v.size());
    auto b = drift(lam, p, beta);
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(b.data(), v.size()));
  };
  dopri45(rhs, y, s.t, t_end, opt);
  ParticleState out = s;
  out.lambdas.assign(y.data(), y.data() + y.size());
  out.t = t_end;
  return out;
}

EmpiricalMeasure empirical_measure(const ParticleState& s) { return {s.lambdas}; }

cplx empirical_stieltjes(const ParticleState& s, cplx z) {
  if (z.imag() == 0.0) throw std::invalid_argument("empirical_stieltjes: Im z must be nonzero");
  cplx acc = 0.0;
  for (double l : s.lambdas) acc += 1.0 / (l - z);
  return acc / static_cast<double>(s.size());
}

double pair_fluctuation(const ParticleState& s, const TestFunction& f, double reference_integral) {
  Kahan k;
  for (double l : s.lambdas) k.add(f(l));
  return k.value() - static_cast<double>(s.size()) * reference_integral;
}

double pair_fluctuation(const ParticleState& s, const TestFunction& f, const Density& reference) {
  double I = reference.integrate(f);
  if (!std::isfinite(I)) throw NumericalError("pair_fluctuation: quadrature of f against reference failed");
  return pair_fluctuation(s, f, I);
}

ParticleState quantile_state(const Density& rho, int N) {
  if (N < 1) throw ConfigError("N >= 1 required");
  ParticleState s;
  s.lambdas.resize(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) s.lambdas[i] = rho.quantile((i + 0.5) / N);
  return s;
}

ParticleState iid_state(const Density& rho, int N, std::uint64_t seed, std::uint64_t replica) {
  CounterRng rng(hash_combine(seed, replica), 0, 0xabcdefULL);
  ParticleState s;
  s.seed = seed;
  s.replica = replica;
  for (int i = 0; i < N; ++i) s.lambdas.push_back(rho.quantile(rng.uniform()));
  std::sort(s.lambdas.begin(), s.lambdas.end());
  return s;
}

ParticleState beta_hermite_state(int N, double beta, double kappa, std::uint64_t seed, std::uint64_t replica) {
  if (N < 1) throw ConfigError("N >= 1 required");
  CounterRng rng(hash_combine(seed, replica), 0, 0x5eedULL);
  Eigen::VectorXd d(N);
  Eigen::VectorXd e(std::max(N - 1, 0));
  for (int i = 0; i < N; ++i) d[i] = rng.normal();
  for (int k = 1; k < N; ++k) {
    std::gamma_distribution<double> gam(0.5 * beta * (N - k), 2.0);
    e[k - 1] = std::sqrt(gam(rng)) / std::sqrt(2.0);
  }
  ParticleState s;
  s.seed = seed;
  s.replica = replica;
  if (N == 1) {
    s.lambdas = {d[0] / std::sqrt(2.0 * kappa)};
    return s;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  const double sc = 1.0 / std::sqrt(2.0 * N * kappa);
  for (int i = 0; i < N; ++i) s.lambdas.push_back(es.eigenvalues()[i] * sc);
  std::sort(s.lambdas.begin(), s.lambdas.end());
  return s;
}

std::vector<double> LinearStatSamples::column(int ti, int fi) const {
  std::vector<double> c(samples.size());
  for (size_t r = 0; r < samples.size(); ++r) c[r] = samples[r][static_cast<size_t>(ti * nfuncs + fi)];
  return c;
}

namespace {

ParticleState initial_for(const McConfig& cfg, std::uint64_t r) {
  ParticleState s;
  switch (cfg.placement) {
    case Placement::Quantile:
      s = quantile_state(*cfg.initial, cfg.N);
      break;
    case Placement::Iid:
      s = iid_state(*cfg.initial, cfg.N, cfg.seed, r);
      break;
    case Placement::BetaHermite:
      if (!cfg.potential->is_harmonic()) throw ConfigError("exact equilibrium start needs harmonic V");
      s = beta_hermite_state(cfg.N, cfg.beta, cfg.potential->harmonic_kappa(), cfg.seed, r);
      break;
  }
  s.seed = cfg.seed;
  s.replica = r;
  s.t = 0.0;
  s.step_index = 0;
  return s;
}

ParticleState advance_to(const McConfig& cfg, ParticleState s, double t_target, StepStats& st) {
  const double span = t_target - s.t;
  if (span <= 0.0) return s;
  const long n = std::max(1L, std::lround(std::ceil(span / cfg.dt - 1e-9)));
  const double h = span / static_cast<double>(n);
  for (long i = 0; i < n; ++i) s = step(s, h, *cfg.potential, cfg.beta, cfg.step, &st);
  s.t = t_target;
  return s;
}

}  // namespace

LinearStatSamples sample_linear_statistics(const McConfig& cfg, const std::vector<TestFunction>& funcs,
                                           const std::vector<double>& times, int replicas) {
  if (replicas < 2) throw ConfigError("replicas >= 2 required");
  if (!cfg.potential || !cfg.reference) throw ConfigError("mc: potential and reference density required");
  if (cfg.placement != Placement::BetaHermite && !cfg.initial) throw ConfigError("mc: initial density required");
  for (size_t k = 1; k < times.size(); ++k)
    if (times[k] < times[k - 1]) throw ConfigError("mc: times must be sorted");

  std::vector<double> refint(funcs.size());
  for (size_t j = 0; j < funcs.size(); ++j) {
    refint[j] = cfg.reference->integrate(funcs[j]);
    if (!std::isfinite(refint[j])) throw NumericalError("mc: quadrature of test function failed");
  }

  LinearStatSamples out;
  out.replicas = replicas;
  out.times = times;
  out.nfuncs = static_cast<int>(funcs.size());
  out.samples.assign(static_cast<size_t>(replicas), {});

  std::atomic<int> next{0};
  std::vector<StepStats> wstats(static_cast<size_t>(std::max(cfg.workers, 1)));
  std::vector<std::exception_ptr> errs(wstats.size());
  auto work = [&](size_t w) {
    try {
      for (int r; (r = next.fetch_add(1)) < replicas;) {
        ParticleState s = initial_for(cfg, static_cast<std::uint64_t>(r));
        s = advance_to(cfg, s, cfg.burn_in, wstats[w]);
        std::vector<double> row;
        row.reserve(times.size() * funcs.size());
        for (double t : times) {
          s = advance_to(cfg, s, cfg.burn_in + t, wstats[w]);
          for (size_t j = 0; j < funcs.size(); ++j) {
            double v = pair_fluctuation(s, funcs[j], refint[j]);
            if (!std::isfinite(v)) throw NumericalError("mc: non-finite sample in replica " + std::to_string(r));
            row.push_back(v);
          }
        }
        out.samples[static_cast<size_t>(r)] = std::move(row);
      }
    } catch (...) {
      errs[w] = std::current_exception();
      next.store(replicas);
    }
  };
  if (wstats.size() == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (size_t w = 0; w < wstats.size(); ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  for (auto& s : wstats) {
    out.stats.steps += s.steps;
    out.stats.rejections += s.rejections;
    out.stats.max_depth = std::max(out.stats.max_depth, s.max_depth);
    out.stats.implicit_steps += s.implicit_steps;
  }
  return out;
}

CovarianceEstimate jackknife_covariance(const std::vector<double>& a, const std::vector<double>& b) {
  const size_t n = a.size();
  if (n < 3 || b.size() != n) throw ConfigError("jackknife needs >= 3 paired samples");
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  // centered sums keep the leave-one-out formula well conditioned
  double sa = 0.0, sb = 0.0, sab = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double x = a[i] - ma, y = b[i] - mb;
    sa += x;
    sb += y;
    sab += x * y;
  }
  const double dn = static_cast<double>(n);
  CovarianceEstimate e;
  e.replicas = static_cast<int>(n);
  e.estimate = (sab - sa * sb / dn) / (dn - 1.0);
  std::vector<double> loo(n);
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double x = a[i] - ma, y = b[i] - mb;
    double sa1 = sa - x, sb1 = sb - y, sab1 = sab - x * y;
    loo[i] = (sab1 - sa1 * sb1 / (dn - 1.0)) / (dn - 2.0);
    mean += loo[i];
  }
  mean /= dn;
  double v = 0.0;
  for (double l : loo) v += (l - mean) * (l - mean);
  e.standard_error = std::sqrt((dn - 1.0) / dn * v);
  return e;
}

CovarianceEstimate mc_covariance(const McConfig& cfg, const TestFunction& f, const TestFunction& g, double t1,
                                 double t2, int replicas) {
  std::vector<double> times{std::min(t1, t2), std::max(t1, t2)};
  auto s = sample_linear_statistics(cfg, {f, g}, times, replicas);
  const int i1 = t1 <= t2 ? 0 : 1, i2 = 1 - i1;
  return jackknife_covariance(s.column(i1, 0), s.column(i2, 1));
}

void RunningMoments::push(double x) {
  ++n;
  double d = x - mean;
  mean += d / static_cast<double>(n);
  m2 += d * (x - mean);
}

void RunningMoments::merge(const RunningMoments& o) {
  if (o.n == 0) return;
  if (n == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
  double d = o.mean - mean;
  mean += d * nb / (na + nb);
  m2 += o.m2 + d * d * na * nb / (na + nb);
  n += o.n;
}

void write_trajectory_csv(const std::string& path, const std::vector<ParticleState>& states) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path);
  os << std::setprecision(17) << "replica,t,i,lambda\n";
  for (const auto& s : states)
    for (size_t i = 0; i < s.lambdas.size(); ++i)
      os << s.replica << ',' << s.t << ',' << i << ',' << s.lambdas[i] << '\n';
}

std::string covariance_json(const CovarianceEstimate& e) {
  std::ostringstream os;
  os << std::setprecision(17) << "{\"estimate\": " << e.estimate << ", \"standard_error\": " << e.standard_error
     << ", \"replicas\": " << e.replicas << "}";
  return os.str();
}

}  // namespace loggas
