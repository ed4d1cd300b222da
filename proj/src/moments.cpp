#include <cmath>
#include <sstream>

#include "loggas/hydro.hpp"

namespace loggas {

double scaling_solution(double s0, double t) {
  if (!(s0 > 0.0)) throw ConfigError("scaling solution needs s0 > 0");
  return std::sqrt(1.0 + std::exp(-2.0 * t) * (s0 * s0 - 1.0));
}

int closure_margin(const Potential& p) { return static_cast<int>(p.dcoeffs().size()) - 2; }

std::vector<double> moment_rhs(const MomentVector& m, const Potential& p, double beta, const MomentClosure& c) {
  const auto& a = p.dcoeffs();
  const int dv = static_cast<int>(a.size()) - 1;
  const int K = c.K;
  if (m.order() < K) throw ConfigError("moment vector shorter than closure order K");
  if (c.kind == Closure::FreezeInitial && m.order() < K + dv - 1) {
    std::ostringstream os;
    os << "closure underflow: need moments up to " << K + dv - 1 << ", have " << m.order();
    throw NumericalError(os.str());
  }
  std::vector<double> d(m.m.size(), 0.0);
  for (int k = 1; k <= K; ++k) {
    if (k - 1 + dv > K && c.kind == Closure::ZeroDerivative) continue;
    double conf = 0.0;
    for (int j = 0; j <= dv; ++j) conf += a[j] * m[k - 1 + j];
    double inter = 0.0;
    for (int i = 0; i <= k - 2; ++i) inter += m[i] * m[k - 2 - i];
    d[k] = -k * conf + 0.25 * beta * k * inter;
  }
  return d;
}

cplx TSource::dT(double t, cplx z) const {
  auto c = coeffs(t);
  return horner(poly_derivative(c), z);
}

cplx TSource::d2T(double t, cplx z) const {
  auto c = coeffs(t);
  return horner(poly_derivative(poly_derivative(c)), z);
}

MomentTrajectory MomentTrajectory::solve(const Potential& p, double beta, const MomentVector& initial,
                                         const MomentClosure& closure, double t_end, const OdeOptions& opt) {
  MomentTrajectory tr;
  tr.p_ = std::make_shared<Potential>(p);
  const size_t n = initial.m.size();
  auto rhs = [&](double, const Eigen::VectorXd& y) {
    MomentVector mv{std::vector<double>(y.data(), y.data() + y.size())};
    auto d = moment_rhs(mv, p, beta, closure);
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(n)));
  };
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(initial.m.data(), static_cast<Eigen::Index>(n));
  auto push = [&](double t, const Eigen::VectorXd& v) {
    tr.ts_.push_back(t);
    tr.ms_.emplace_back(v.data(), v.data() + v.size());
    Eigen::VectorXd d = rhs(t, v);
    tr.dms_.emplace_back(d.data(), d.data() + d.size());
    return true;
  };
  push(0.0, y);
  OdeOptions o = opt;
  o.atol = std::min(opt.atol, 1e-12);
  o.rtol = std::min(opt.rtol, 1e-11);
  o.h_max = std::min(opt.h_max, 0.01);
  if (t_end > 0.0) dopri45(rhs, y, 0.0, t_end, o, push);
  return tr;
}

MomentTrajectory MomentTrajectory::constant(const Potential& p, const MomentVector& m) {
  MomentTrajectory tr;
  tr.p_ = std::make_shared<Potential>(p);
  tr.ts_ = {0.0, std::numeric_limits<double>::infinity()};
  tr.ms_ = {m.m, m.m};
  tr.dms_ = {std::vector<double>(m.m.size(), 0.0), std::vector<double>(m.m.size(), 0.0)};
  return tr;
}

MomentVector MomentTrajectory::at(double t) const {
  if (t < -1e-14 || t > ts_.back() * (1.0 + 1e-12) + 1e-12) {
    std::ostringstream os;
    os << "T_t source unavailable at requested time t=" << t << " (solved up to " << ts_.back() << ")";
    throw NumericalError(os.str());
  }
  if (ts_.size() == 1 || std::isinf(ts_.back())) return {ms_.front()};
  size_t i = static_cast<size_t>(std::upper_bound(ts_.begin(), ts_.end(), t) - ts_.begin());
  i = std::clamp<size_t>(i, 1, ts_.size() - 1);
  const double t0 = ts_[i - 1], h = ts_[i] - t0;
  const double s = std::clamp((t - t0) / h, 0.0, 1.0);
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  MomentVector out;
  out.m.resize(ms_[i].size());
  for (size_t k = 0; k < out.m.size(); ++k)
    out.m[k] = h00 * ms_[i - 1][k] + h10 * h * dms_[i - 1][k] + h01 * ms_[i][k] + h11 * h * dms_[i][k];
  return out;
}

std::vector<double> MomentTrajectory::coeffs(double t) const { return t_polynomial(*p_, at(t)); }

}  // namespace loggas
