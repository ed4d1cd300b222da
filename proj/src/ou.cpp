#include "loggas/ou.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>

#include "loggas/fluctuation.hpp"
#include "loggas/rng.hpp"
#include "loggas/transforms.hpp"

namespace loggas {

namespace {
constexpr double kPi = std::numbers::pi;
}

void OUSpectral::check_lyapunov(double tol) const {
  for (size_t j = 0; j < modes.size(); ++j) {
    const double lhs = stationary_cov[j] * drift[j], rhs = noise_sq[j];
    if (!std::isfinite(lhs) || !std::isfinite(rhs) || std::abs(lhs - rhs) > tol * std::max(std::abs(rhs), 1e-300))
      throw NumericalError("Lyapunov relation fails for mode " + std::to_string(modes[j]));
  }
}

OUSpectral identify(const ModeKernel& k, const IdentifyOptions& opt) {
  if (opt.nmax < 1) throw ConfigError("identify: nmax ≥ 1 required");
  if (!(opt.h > 0.0) || opt.start < 0.0) throw ConfigError("identify: h > 0 and start ≥ 0 required");
  OUSpectral s;
  for (int n = 1; n <= opt.nmax; ++n) {
    const double k0 = k(opt.start, n), k1 = k(opt.start + opt.h, n), k2 = k(opt.start + 2 * opt.h, n);
    if (!(k0 > 0.0 && k1 > 0.0 && k2 > 0.0)) throw NumericalError("identify: mode " + std::to_string(n) + " is not positive");
    const double l0 = std::log(k0), l1 = std::log(k1), l2 = std::log(k2);
    const double a = -(-3.0 * l0 + 4.0 * l1 - l2) / (2.0 * opt.h);
    if (!(a > 0.0)) throw NumericalError("identify: non-decaying mode " + std::to_string(n));
    const double kinf = std::exp(l0 + a * opt.start);
    s.modes.push_back(n);
    s.drift.push_back(a);
    s.stationary_cov.push_back(kinf);
    s.noise_sq.push_back(a * kinf);
  }
  s.check_lyapunov();
  return s;
}

double HermiteModeKernel::operator()(double dt, int n) {
  if (!(dt > 0.0)) throw ConfigError("HermiteModeKernel: dt > 0 required");
  if (n < 1 || 2 * n >= M_) throw ConfigError("HermiteModeKernel: mode out of range");
  if (dt != last_dt_) {
    std::vector<double> f(static_cast<size_t>(M_));
    for (int j = 0; j < M_; ++j) f[static_cast<size_t>(j)] = hermite_gtilde_minus(dt, 2.0 * kPi * j / M_);
    auto c = periodic_coefficients(f, M_ / 2 - 1);
    coeffs_.assign(static_cast<size_t>(M_ / 2), 0.0);
    for (int m = 1; m < M_ / 2; ++m) coeffs_[static_cast<size_t>(m)] = 2.0 * c[m].real();
    last_dt_ = dt;
  }
  return coeffs_[static_cast<size_t>(n)];
}

double hermite_tail_bias(int nmax, double dt) {
  if (!(dt > 0.0)) throw ConfigError("hermite_tail_bias: dt > 0 required");
  // Σ_{n>m} n q^n = q^{m+1}((m+1) − m q)/(1−q)²
  const double q = std::exp(-dt), m = nmax;
  return std::pow(q, m + 1) * ((m + 1) - m * q) / ((1 - q) * (1 - q)) / (2.0 * kPi * kPi);
}

OUTrajectory simulate(const OUSpectral& spec, double t_end, double dt, std::uint64_t seed,
                      const SimulateOptions& opt) {
  if (!(dt > 0.0) || t_end < 0.0) throw ConfigError("simulate: dt > 0 and t_end ≥ 0 required");
  if (opt.record_every < 1) throw ConfigError("simulate: record_every ≥ 1 required");
  const size_t J = spec.size();
  double amax = 0.0;
  for (double a : spec.drift) amax = std::max(amax, a);
  if (dt * amax >= 0.5) throw ConfigError("simulate: instability margin violated (dt·max Â ≥ 1/2)");

  std::vector<double> decay(J), sd(J);
  for (size_t j = 0; j < J; ++j) {
    const double a = spec.drift[j];
    decay[j] = std::exp(-a * dt);
    sd[j] = a > 0.0 ? std::sqrt(spec.noise_sq[j] / a * -std::expm1(-2.0 * a * dt)) : std::sqrt(2.0 * spec.noise_sq[j] * dt);
  }

  std::vector<double> x(J);
  if (opt.initial) {
    if (opt.initial->size() != J) throw ConfigError("simulate: initial state has the wrong size");
    x = *opt.initial;
  } else {
    CounterRng rng(seed, opt.replica, 0);
    for (size_t j = 0; j < J; ++j) x[j] = std::sqrt(spec.stationary_cov[j]) * rng.normal();
  }

  OUTrajectory tr;
  tr.modes = spec.modes;
  tr.times.push_back(0.0);
  tr.values.push_back(x);
  const long steps = std::lround(t_end / dt);
  for (long s = 1; s <= steps; ++s) {
    CounterRng rng(seed, opt.replica, static_cast<std::uint64_t>(s));
    for (size_t j = 0; j < J; ++j) x[j] = decay[j] * x[j] + sd[j] * rng.normal();
    if (s % opt.record_every == 0 || s == steps) {
      tr.times.push_back(static_cast<double>(s) * dt);
      tr.values.push_back(x);
    }
  }
  return tr;
}

std::vector<double> assemble_field(const OUSpectral& spec, const std::vector<double>& amplitudes,
                                   const std::vector<double>& thetas) {
  if (amplitudes.size() != spec.size()) throw ConfigError("assemble_field: amplitude count mismatch");
  std::vector<double> y(thetas.size(), 0.0);
  for (size_t i = 0; i < thetas.size(); ++i) {
    double s = 0.0;
    for (size_t j = 0; j < spec.size(); ++j) s += amplitudes[j] * std::cos(spec.modes[j] * thetas[i]);
    y[i] = std::numbers::sqrt2 * s;
  }
  return y;
}

void write_spectral_csv(const std::string& path, const OUSpectral& spec) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << std::setprecision(17) << "n,A,K,noise_sq\n";
  for (size_t j = 0; j < spec.size(); ++j)
    out << spec.modes[j] << ',' << spec.drift[j] << ',' << spec.stationary_cov[j] << ',' << spec.noise_sq[j] << '\n';
}

void write_ou_trajectory_csv(const std::string& path, const OUTrajectory& tr) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << std::setprecision(17) << "t,n,re,im\n";
  for (size_t k = 0; k < tr.times.size(); ++k)
    for (size_t j = 0; j < tr.modes.size(); ++j) out << tr.times[k] << ',' << tr.modes[j] << ',' << tr.values[k][j] << ",0\n";
}

}  // namespace loggas
