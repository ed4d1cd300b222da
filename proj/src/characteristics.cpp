#include <cmath>

#include "loggas/hydro.hpp"

namespace loggas {

namespace {

using Vec5 = Eigen::Matrix<cplx, 5, 1>;

struct CharRhs {
  const Potential& p;
  double beta;
  const TSource& T;

  Vec5 operator()(double t, const Vec5& y) const {
    const cplx z = y[0], c = y[1];
    auto tc = T.coeffs(t);
    cplx tp = 0.0, tpp = 0.0;
    for (size_t k = tc.size(); k-- > 1;) tp = tp * z + static_cast<double>(k) * tc[k];
    for (size_t k = tc.size(); k-- > 2;) tpp = tpp * z + static_cast<double>(k * (k - 1)) * tc[k];
    const cplx v1 = p.eval(z, 1), v2 = p.eval(z, 2), v3 = p.eval(z, 3);
    Vec5 d;
    d[0] = 0.5 * beta * c - v1;
    d[1] = v2 * c - tp;
    d[2] = v2;
    d[3] = 0.5 * beta * y[4] - v2 * y[3];
    d[4] = (v3 * c - tpp) * y[3] + v2 * y[4];
    return d;
  }
};

Vec5 pack(const CharState& s) {
  Vec5 y;
  y << s.z, s.c, s.logA, s.dz, s.dc;
  return y;
}

CharState unpack(double t, const Vec5& y, const Potential& p, double beta) {
  CharState s;
  s.t = t;
  s.z = y[0];
  s.c = y[1];
  s.logA = y[2];
  s.dz = y[3];
  s.dc = y[4];
  s.zdot = 0.5 * beta * s.c - p.eval(s.z, 1);
  return s;
}

}  // namespace

InitialSlice InitialSlice::from(std::shared_ptr<const Density> d) {
  return {[d](cplx z) { return d->stieltjes(z); }, [d](cplx z) { return d->stieltjes_d1(z); }};
}

InitialSlice InitialSlice::from(const UField& f, double t) {
  return {[&f, t](cplx z) { return f.u(t, z); }, [&f, t](cplx z) { return f.du(t, z); }};
}

CharState launch(cplx z0, double t0, const InitialSlice& u0, const Potential& p, double beta) {
  CharState s;
  s.t = t0;
  s.z = z0;
  s.z0 = z0;
  s.c = -u0.u(z0);
  s.logA = 0.0;
  s.dz = 1.0;
  s.dc = -u0.du(z0);
  s.zdot = 0.5 * beta * s.c - p.eval(z0, 1);
  return s;
}

CharState propagate(CharState s, double t_end, const Potential& p, double beta, const TSource& T,
                    const FlowOptions& opt) {
  if (!s.alive || t_end == s.t) return s;
  CharRhs rhs{p, beta, T};
  Vec5 y = pack(s);
  Vec5 prev = y;
  double tprev = s.t;
  bool killed = false;
  double tk = 0.0;
  auto obs = [&](double t, const Vec5& v) {
    if (opt.kill && v[0].imag() < 0.0) {
      double a = prev[0].imag(), b = v[0].imag();
      tk = tprev + (t - tprev) * a / (a - b);
      killed = true;
      return false;
    }
    prev = v;
    tprev = t;
    return true;
  };
  dopri45(rhs, y, s.t, t_end, opt.ode, obs);
  if (killed) {
    CharState out = unpack(tprev, prev, p, beta);
    out.z0 = s.z0;
    out.alive = false;
    out.kill_time = tk;
    return out;
  }
  for (int i = 0; i < 5; ++i)
    if (!std::isfinite(y[i].real()) || !std::isfinite(y[i].imag()))
      throw NumericalError("characteristic: non-finite state");
  CharState out = unpack(t_end, y, p, beta);
  out.z0 = s.z0;
  return out;
}

std::vector<CharState> characteristic_flow(cplx z0, double t_end, const InitialSlice& u0, const Potential& p,
                                           double beta, const TSource& T, const FlowOptions& opt, double t0) {
  std::vector<CharState> path{launch(z0, t0, u0, p, beta)};
  if (opt.kill && z0.imag() < 0.0) throw NumericalError("characteristic launched below the real axis");
  CharRhs rhs{p, beta, T};
  Vec5 y = pack(path.front());
  auto obs = [&](double t, const Vec5& v) {
    if (opt.kill && v[0].imag() < 0.0) {
      CharState& last = path.back();
      double a = last.z.imag(), b = v[0].imag();
      CharState dead = last;
      dead.alive = false;
      dead.kill_time = last.t + (t - last.t) * a / (a - b);
      path.push_back(dead);
      return false;
    }
    path.push_back(unpack(t, v, p, beta));
    path.back().z0 = z0;
    return true;
  };
  dopri45(rhs, y, t0, t_end, opt.ode, obs);
  return path;
}

}  // namespace loggas
