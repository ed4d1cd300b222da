#include "loggas/support.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace loggas {

SupportInputs SupportInputs::from(const HydroProblem& prob, double t_end) {
  SupportInputs in;
  in.potential = prob.potential;
  in.beta = prob.beta;
  in.initial = prob.initial;
  in.ode = prob.ode;
  const Potential& p = *prob.potential;
  MomentClosure cl = prob.closure;
  cl.K = std::max(cl.K, static_cast<int>(p.dcoeffs().size()) - 2);
  MomentVector m0 = prob.initial->moments(cl.K + closure_margin(p));
  in.T = std::make_shared<MomentTrajectory>(MomentTrajectory::solve(p, prob.beta, m0, cl, t_end, prob.ode));
  return in;
}

RealCharacteristic real_characteristic_with_jacobian(double x0, double t, const SupportInputs& in) {
  const Potential& p = *in.potential;
  const Density& d = *in.initial;
  if (x0 >= d.lower() && x0 <= d.upper()) {
    std::ostringstream os;
    os << "characteristic enters the initial support's forbidden region (x0=" << x0 << ")";
    throw NumericalError(os.str());
  }
  if (!d.analytic() && !in.certified_off_support)
    throw ConfigError("numeric initial data: off-support analyticity of U0 must be certified");
  const double hb = 0.5 * in.beta;
  const double u0 = d.stieltjes(cplx(x0, 0.0)).real();
  const double u0d = d.stieltjes_d1(cplx(x0, 0.0)).real();
  Eigen::Vector4d y;
  y << x0, -hb * u0 - p.eval(x0, 1), 1.0, -hb * u0d - p.eval(x0, 2);
  if (!y.allFinite()) throw NumericalError("non-finite Jacobian at launch");
  const TSource& T = *in.T;
  // z'' = V''V' − (β/2)T'(z) and its linearization
  auto rhs = [&](double s, const Eigen::Vector4d& v) {
    const double z = v[0];
    const double v1 = p.eval(z, 1), v2 = p.eval(z, 2), v3 = p.eval(z, 3);
    const double tp = T.dT(s, cplx(z, 0.0)).real(), tpp = T.d2T(s, cplx(z, 0.0)).real();
    Eigen::Vector4d dv;
    dv << v[1], v2 * v1 - hb * tp, v[3], (v3 * v1 + v2 * v2 - hb * tpp) * v[2];
    return dv;
  };
  // once Z' ≤ 0 the characteristic has been absorbed into the support; past that
  // point it runs off along the reflected branch, so stop there
  if (t > 0.0) dopri45(rhs, y, 0.0, t, in.ode, [](double, const Eigen::Vector4d& v) { return v[2] > 0.0; });
  if (!y.allFinite()) throw NumericalError("non-finite Jacobian");
  return {y[0], y[2], y[1]};
}

EdgeResult edge(double t, Side side, const SupportInputs& in, const EdgeScan& scan) {
  const Density& d = *in.initial;
  const double sgn = side == Side::Right ? 1.0 : -1.0;
  const double b0 = side == Side::Right ? d.upper() : d.lower();
  EdgeResult r;
  if (t == 0.0) {
    r.x_star = r.edge = b0;
    r.margin = 1.0;
    return r;
  }
  const double width = d.upper() - d.lower();
  const double dmin = 1e-6 * std::max(std::abs(b0), width);
  const double dmax = 10.0 * (1.0 + std::abs(b0));
  auto at = [&](double dist) { return real_characteristic_with_jacobian(b0 + sgn * dist, t, in); };

  const int n = std::max(scan.points, 2);
  std::vector<double> dist(n);
  for (int k = 0; k < n; ++k) dist[k] = dmin * std::pow(dmax / dmin, static_cast<double>(k) / (n - 1));
  double margin = std::numeric_limits<double>::infinity();
  int hit = -1;
  int ok = 0, top = -1;
  for (int k = n - 1; k >= 0; --k) {
    double j;
    try {
      j = at(dist[k]).jacobian;
    } catch (const NumericalError&) {
      // z'' = V''V' − … carries a mode growing like e^{V''t}; far launch points overflow for steep V
      if (ok == 0) continue;
      throw;
    }
    if (ok++ == 0) top = k;
    if (j <= 0.0) {
      hit = k;
      break;
    }
    margin = std::min(margin, j);
  }
  if (ok == 0) throw NumericalError("edge: no launch point in the scan range could be integrated");
  if (hit < 0) {
    r.boundary_case = true;
    r.x_star = b0;
    auto rc = at(dmin);
    r.edge = rc.z;
    r.margin = margin;
    r.speed = std::abs(rc.velocity);
    return r;
  }
  if (hit == top) throw NumericalError("edge: every scanned pre-image is absorbed; the edge pre-image lies beyond the scan range");
  double lo = dist[hit], hi = dist[hit + 1];  // Z' ≤ 0 at lo, > 0 at hi
  while (hi - lo > scan.bisect_tol) {
    double mid = 0.5 * (lo + hi);
    (at(mid).jacobian <= 0.0 ? lo : hi) = mid;
  }
  // pre-images hug b0 at short times, so polish beyond the absolute tolerance
  {
    std::uintmax_t iters = 100;
    auto fj = [&](double s) { return at(s).jacobian; };
    double flo = fj(lo), fhi = fj(hi);
    if (flo < 0.0 && fhi > 0.0) {
      auto br = boost::math::tools::toms748_solve(fj, lo, hi, flo, fhi,
                                                  boost::math::tools::eps_tolerance<double>(50), iters);
      hi = br.second;
    }
  }
  r.x_star = b0 + sgn * hi;
  auto rc = at(hi);
  r.edge = rc.z;
  r.speed = std::abs(rc.velocity);
  r.margin = margin;
  return r;
}

EdgeTrajectory track_support(const std::vector<double>& times, const SupportInputs& in, const EdgeScan& scan) {
  EdgeTrajectory tr;
  for (size_t k = 0; k < times.size(); ++k) {
    if (k && times[k] < times[k - 1]) throw ConfigError("track_support: times must be sorted");
    EdgeResult l = edge(times[k], Side::Left, in, scan), r = edge(times[k], Side::Right, in, scan);
    if (l.edge > r.edge) throw NumericalError("track_support: a_t > b_t");
    tr.times.push_back(times[k]);
    tr.a.push_back(l.edge);
    tr.b.push_back(r.edge);
    tr.a_star.push_back(l.x_star);
    tr.b_star.push_back(r.x_star);
    tr.margin.push_back(std::min(l.margin, r.margin));
    tr.boundary.push_back(l.boundary_case || r.boundary_case);
    if (k) {
      // db/dt equals ż at the pre-image, since Z' vanishes there
      const double dt = times[k] - times[k - 1];
      const double tol = 1e-8;
      const double cb = 2.0 * r.speed + 1.0, ca = 2.0 * l.speed + 1.0;
      if (tr.b[k] > tr.b[k - 1] + cb * dt + tol || tr.a[k] < tr.a[k - 1] - ca * dt - tol)
        tr.jumps.push_back(static_cast<int>(k));
    }
  }
  return tr;
}

void EdgeTrajectory::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path);
  os << std::setprecision(17) << "t,a_star,a,b_star,b,margin\n";
  for (size_t k = 0; k < times.size(); ++k)
    os << times[k] << ',' << a_star[k] << ',' << a[k] << ',' << b_star[k] << ',' << b[k] << ',' << margin[k] << '\n';
}

}  // namespace loggas
