#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "loggas/hydro.hpp"
#include "loggas/transforms.hpp"

namespace loggas {

namespace {

double cross(cplx o, cplx a, cplx b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) - (a.imag() - o.imag()) * (b.real() - o.real());
}

// Andrew's monotone chain, counter-clockwise
std::vector<cplx> convex_hull(std::vector<cplx> pts) {
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  if (pts.size() < 3) return pts;
  std::vector<cplx> h(2 * pts.size());
  size_t k = 0;
  for (size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace

HydroField HydroField::solve(const HydroProblem& prob, std::vector<double> times, const FanGeometry& fan) {
  if (!prob.potential || !prob.initial) throw ConfigError("hydro: potential and initial density required");
  if (!(prob.beta > 0.0)) throw ConfigError("hydro: beta must be > 0");
  if (fan.n_real < 2 || fan.n_imag < 2 || !(fan.imag_min > 0.0) || !(fan.imag_max > fan.imag_min))
    throw ConfigError("hydro: bad fan geometry");
  times.push_back(0.0);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.front() < 0.0) throw ConfigError("hydro: negative time");

  HydroField f;
  f.prob_ = prob;
  f.times_ = times;
  f.geom_ = fan;
  f.u0_ = InitialSlice::from(prob.initial);
  const Potential& p = *prob.potential;

  const int K = std::max(prob.closure.K, static_cast<int>(p.dcoeffs().size()) - 2);
  MomentClosure cl = prob.closure;
  cl.K = K;
  MomentVector m0 = prob.initial->moments(K + closure_margin(p));
  f.moments_ = std::make_shared<MomentTrajectory>(
      MomentTrajectory::solve(p, prob.beta, m0, cl, f.times_.back(), prob.ode));

  const double lo = prob.initial->lower(), hi = prob.initial->upper();
  const double c0 = 0.5 * (lo + hi), half = 0.5 * fan.span_factor * (hi - lo);
  for (int j = 0; j < fan.n_imag; ++j) {
    double y = fan.imag_min * std::pow(fan.imag_max / fan.imag_min, static_cast<double>(j) / (fan.n_imag - 1));
    for (int i = 0; i < fan.n_real; ++i) {
      double x = c0 - half + 2.0 * half * i / (fan.n_real - 1);
      f.launch_.emplace_back(x, y);
    }
  }

  FlowOptions fo;
  fo.ode = prob.ode;
  f.fan_.assign(f.times_.size(), std::vector<CharState>(f.launch_.size()));
  for (size_t idx = 0; idx < f.launch_.size(); ++idx) {
    CharState s = launch(f.launch_[idx], 0.0, f.u0_, p, prob.beta);
    for (size_t k = 0; k < f.times_.size(); ++k) {
      s = propagate(s, f.times_[k], p, prob.beta, *f.moments_, fo);
      f.fan_[k][idx] = s;
    }
  }
  for (auto& snap : f.fan_) {
    std::vector<cplx> live;
    for (auto& s : snap)
      if (s.alive) live.push_back(s.z);
    f.hull_.push_back(convex_hull(live));
  }
  return f;
}

size_t HydroField::nearest_snapshot(double t) const {
  if (t < 0.0 || t > times_.back() * (1 + 1e-12)) {
    std::ostringstream os;
    os << "hydro field not solved at t=" << t;
    throw NumericalError(os.str());
  }
  size_t best = 0;
  for (size_t k = 1; k < times_.size(); ++k)
    if (std::abs(times_[k] - t) < std::abs(times_[best] - t)) best = k;
  return best;
}

bool HydroField::in_hull(size_t k, cplx z) const {
  const auto& h = hull_[k];
  if (h.size() < 3) return false;
  for (size_t i = 0; i < h.size(); ++i)
    if (cross(h[i], h[(i + 1) % h.size()], z) < -1e-14) return false;
  return true;
}

bool HydroField::locate(size_t k, cplx z, cplx& z0, cplx& u) const {
  const auto& snap = fan_[k];
  const int nr = geom_.n_real;
  auto id = [nr](int i, int j) { return static_cast<size_t>(j * nr + i); };
  for (int j = 0; j + 1 < geom_.n_imag; ++j)
    for (int i = 0; i + 1 < nr; ++i) {
      const size_t tri[2][3] = {{id(i, j), id(i + 1, j), id(i, j + 1)},
                                {id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)}};
      for (const auto& t : tri) {
        const CharState &a = snap[t[0]], &b = snap[t[1]], &c = snap[t[2]];
        if (!a.alive || !b.alive || !c.alive) continue;
        double det = cross(a.z, b.z, c.z);
        if (det == 0.0) continue;
        double l1 = cross(z, b.z, c.z) / det, l2 = cross(a.z, z, c.z) / det, l3 = 1.0 - l1 - l2;
        const double tol = -1e-12;
        if (l1 < tol || l2 < tol || l3 < tol) continue;
        z0 = l1 * launch_[t[0]] + l2 * launch_[t[1]] + l3 * launch_[t[2]];
        u = -(l1 * a.c + l2 * b.c + l3 * c.c);
        return true;
      }
    }
  return false;
}

cplx HydroField::nearest_guess(size_t k, cplx z) const {
  double best = std::numeric_limits<double>::infinity();
  cplx g = z;
  for (size_t i = 0; i < fan_[k].size(); ++i) {
    if (!fan_[k][i].alive) continue;
    double d = std::abs(fan_[k][i].z - z);
    if (d < best) {
      best = d;
      g = launch_[i];
    }
  }
  return g;
}

CharState HydroField::refine(double t, cplx z, cplx guess) const {
  const Potential& p = *prob_.potential;
  FlowOptions fo;
  fo.ode = prob_.ode;
  fo.kill = false;
  auto eval = [&](cplx z0) { return propagate(launch(z0, 0.0, u0_, p, prob_.beta), t, p, prob_.beta, *moments_, fo); };
  const double tol = 1e-13 * (1.0 + std::abs(z));
  cplx z0 = guess;
  if (z0.imag() < 0.0) z0.imag(0.0);
  CharState s = eval(z0);
  double r = std::abs(s.z - z);
  for (int it = 0; it < 60; ++it) {
    if (r <= tol) return s;
    cplx stepv = (s.z - z) / s.dz;
    double lam = 1.0;
    bool moved = false;
    for (int h = 0; h < 40; ++h, lam *= 0.5) {
      cplx cand = z0 - lam * stepv;
      if (cand.imag() < 0.0) continue;
      CharState sc;
      try {
        sc = eval(cand);
      } catch (const NumericalError&) {
        continue;
      }
      double rc = std::abs(sc.z - z);
      if (rc < r || rc <= tol) {
        z0 = cand;
        s = sc;
        r = rc;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (r <= 1e-10 * (1.0 + std::abs(z))) return s;
  std::ostringstream os;
  os << "characteristic inversion failed at t=" << t << ", z=" << z << " (residual " << r << ")";
  throw NumericalError(os.str());
}

UFieldValue HydroField::u_field(double t, cplx z) const {
  const size_t k = nearest_snapshot(t);
  if (!in_hull(k, z)) {
    std::ostringstream os;
    os << "refine fan: z=" << z << " outside the live characteristic fan at t=" << times_[k];
    throw NumericalError(os.str());
  }
  cplx z0, ulin;
  bool found = locate(k, z, z0, ulin);
  if (!found) z0 = nearest_guess(k, z);
  CharState s = refine(t, z, z0);
  UFieldValue v;
  v.value = -s.c;
  v.preimage = s.z0;
  v.error_estimate = found ? std::abs(ulin - v.value) : std::numeric_limits<double>::quiet_NaN();
  return v;
}

cplx HydroField::u(double t, cplx z) const {
  const size_t k = nearest_snapshot(t);
  cplx z0, ulin;
  if (!locate(k, z, z0, ulin)) z0 = nearest_guess(k, z);
  return -refine(t, z, z0).c;
}

cplx HydroField::du(double t, cplx z) const {
  const size_t k = nearest_snapshot(t);
  cplx z0, ulin;
  if (!locate(k, z, z0, ulin)) z0 = nearest_guess(k, z);
  CharState s = refine(t, z, z0);
  return -s.dc / s.dz;
}

double HydroField::density(double t, double x) const {
  try {
    return plemelj_density([&](double e) { return u(t, cplx(x, e)); }, prob_.plemelj_eps, std::nullopt, x).rho;
  } catch (const NumericalError& e) {
    std::ostringstream os;
    os << "fan too sparse near x=" << x << " at t=" << t << ": " << e.what();
    throw NumericalError(os.str());
  }
}

void HydroField::write_snapshots_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path);
  os << std::setprecision(17) << "t,re_z,im_z,re_u,im_u\n";
  for (size_t k = 0; k < times_.size(); ++k)
    for (const auto& s : fan_[k])
      if (s.alive) os << times_[k] << ',' << s.z.real() << ',' << s.z.imag() << ',' << -s.c.real() << ',' << -s.c.imag() << '\n';
}

void HydroField::write_density_csv(const std::string& path, const std::vector<double>& xs) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path);
  os << std::setprecision(17) << "t,x,rho\n";
  for (double t : times_)
    for (double x : xs) {
      os << t << ',' << x << ',';
      try {
        os << density(t, x) << '\n';
      } catch (const NumericalError&) {
        os << "nan\n";
      }
    }
}

}  // namespace loggas
