#include "loggas/transforms.hpp"

#include <fftw3.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>

namespace loggas {

namespace {
constexpr double kPi = std::numbers::pi;

// fftw planner is not thread safe
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// cot u = 1/u − Σ_k c_k u^{2k−1}
constexpr double kCot[] = {1.0 / 3.0, 1.0 / 45.0, 2.0 / 945.0, 1.0 / 4725.0, 2.0 / 93555.0,
                           1382.0 / 638512875.0};
}  // namespace

double GridFunction::spacing() const {
  if (xs.size() < 2) throw ConfigError("grid needs at least two points");
  return (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
}

void GridFunction::check_uniform(double rel_tol) const {
  if (xs.size() != values.size()) throw ConfigError("grid/value size mismatch");
  const double h = spacing();
  if (!(h > 0.0)) throw ConfigError("grid must be strictly increasing");
  for (size_t i = 1; i < xs.size(); ++i)
    if (std::abs(xs[i] - xs[i - 1] - h) > rel_tol * h * 10.0 + 1e-15)
      throw ConfigError("non-uniform grid");
}

PeriodicCoefficients PeriodicCoefficients::zeros(int nmax) {
  PeriodicCoefficients p;
  p.nmax = nmax;
  p.c.assign(static_cast<size_t>(2 * nmax + 1), 0.0);
  return p;
}

cplx PeriodicCoefficients::eval(double theta) const {
  cplx s = 0.0;
  for (int n = -nmax; n <= nmax; ++n) s += (*this)[n] * std::exp(cplx(0.0, n * theta));
  return s;
}

cplx stieltjes(const GridFunction& phi, cplx z) {
  if (phi.xs.size() != phi.values.size() || phi.xs.size() < 2) throw ConfigError("bad grid function");
  if (z.imag() == 0.0 && z.real() >= phi.xs.front() && z.real() <= phi.xs.back())
    throw NumericalError("z on the real support: use boundary_value");
  cplx s = 0.0;
  for (size_t i = 1; i < phi.xs.size(); ++i) {
    double h = phi.xs[i] - phi.xs[i - 1];
    s += 0.5 * h * (phi.values[i - 1] / (phi.xs[i - 1] - z) + phi.values[i] / (phi.xs[i] - z));
  }
  return s;
}

GridFunction hilbert_line(const GridFunction& f, const HilbertOptions& opt) {
  f.check_uniform();
  if (opt.pad_factor < 2) throw ConfigError("pad factor must be >= 2");
  const size_t n = f.xs.size();
  const size_t L = n * static_cast<size_t>(opt.pad_factor);
  const double h = f.spacing();
  const double period = static_cast<double>(L) * h;

  std::vector<double> v(f.values);
  if (opt.taper > 0.0) {
    size_t w = static_cast<size_t>(opt.taper * static_cast<double>(n));
    for (size_t i = 0; i < w; ++i) {
      double s = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(i) / static_cast<double>(w)));
      v[i] *= s;
      v[n - 1 - i] *= s;
    }
  }

  std::vector<double> buf(L, 0.0);
  std::copy(v.begin(), v.end(), buf.begin());
  const size_t nc = L / 2 + 1;
  fftw_complex* spec = fftw_alloc_complex(nc);
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lk(planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(L), buf.data(), spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(L), spec, buf.data(), FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  spec[0][0] = spec[0][1] = 0.0;
  for (size_t k = 1; k < nc; ++k) {
    // multiply by −i
    double re = spec[k][0], im = spec[k][1];
    spec[k][0] = im;
    spec[k][1] = -re;
  }
  if (L % 2 == 0) spec[nc - 1][0] = spec[nc - 1][1] = 0.0;
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lk(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  fftw_free(spec);

  // Periodic transform uses (1/P)cot(π(x−y)/P); add back the regular part
  // (1/P) Σ c_k (π/P)^{p} ∫(x−y)^{p} f(y)dy, p = 2k−1, via centered moments.
  const int nterms = std::clamp(opt.correction_terms, 0, 6);
  const int pmax = 2 * nterms - 1;
  const double xc = 0.5 * (f.xs.front() + f.xs.back());
  std::vector<double> mom(static_cast<size_t>(std::max(pmax, 0) + 1), 0.0);
  for (size_t j = 0; j < n; ++j) {
    double y = f.xs[j] - xc, w = (j == 0 || j == n - 1) ? 0.5 * h : h, yp = 1.0;
    for (int m = 0; m <= pmax; ++m) {
      mom[m] += w * v[j] * yp;
      yp *= y;
    }
  }

  GridFunction out;
  out.xs = f.xs;
  out.values.resize(n);
  const double inv_l = 1.0 / static_cast<double>(L);
  for (size_t i = 0; i < n; ++i) {
    double x = f.xs[i] - xc;
    double corr = 0.0;
    for (int k = 1; k <= nterms; ++k) {
      const int p = 2 * k - 1;
      // ∫(x−y)^p f = Σ_m C(p,m) x^{p−m} (−1)^m M_m
      double s = 0.0, binom = 1.0;
      for (int m = 0; m <= p; ++m) {
        s += binom * std::pow(x, p - m) * ((m % 2) ? -mom[m] : mom[m]);
        binom = binom * (p - m) / (m + 1);
      }
      corr += kCot[k - 1] * std::pow(kPi / period, p) * s;
    }
    out.values[i] = buf[i] * inv_l + corr / period;
  }
  out.mean_removed = f.mean_removed;
  return out;
}

PeriodicCoefficients periodic_coefficients(const std::vector<double>& samples, int nmax) {
  const int M = static_cast<int>(samples.size());
  if (nmax < 0 || 2 * nmax >= M) throw ConfigError("periodic_coefficients: need M > 2 nmax");
  std::vector<double> in(samples);
  fftw_complex* spec = fftw_alloc_complex(static_cast<size_t>(M / 2 + 1));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(M, in.data(), spec, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  PeriodicCoefficients c = PeriodicCoefficients::zeros(nmax);
  for (int n = 0; n <= nmax; ++n) {
    cplx v(spec[n][0] / M, spec[n][1] / M);
    c[n] = v;
    c[-n] = std::conj(v);
  }
  {
    std::lock_guard<std::mutex> lk(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(spec);
  return c;
}

std::vector<double> periodic_samples(const PeriodicCoefficients& c, int M) {
  if (2 * c.nmax >= M) throw ConfigError("periodic_samples: need M > 2 nmax");
  fftw_complex* spec = fftw_alloc_complex(static_cast<size_t>(M / 2 + 1));
  for (int n = 0; n <= M / 2; ++n) spec[n][0] = spec[n][1] = 0.0;
  for (int n = 0; n <= c.nmax; ++n) {
    // real output assumes c_{−n} = conj c_n
    spec[n][0] = c[n].real();
    spec[n][1] = c[n].imag();
  }
  std::vector<double> out(static_cast<size_t>(M));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lk(planner_mutex());
    plan = fftw_plan_dft_c2r_1d(M, spec, out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lk(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(spec);
  return out;
}

PeriodicCoefficients hilbert_periodic(const PeriodicCoefficients& c) {
  if (std::abs(c[0]) != 0.0) throw ConfigError("zero-mean required");
  PeriodicCoefficients out = PeriodicCoefficients::zeros(c.nmax);
  for (int n = -c.nmax; n <= c.nmax; ++n) {
    if (n == 0) continue;
    out[n] = cplx(0.0, n > 0 ? -1.0 : 1.0) * c[n];
  }
  return out;
}

double plemelj_density(cplx u_plus) { return u_plus.imag() / kPi; }

PlemeljValue plemelj_density(const std::function<cplx(double)>& u_eps, double eps,
                             std::optional<std::pair<double, double>> edges, double x) {
  if (!(eps > 0.0)) throw ConfigError("plemelj: eps must be > 0");
  cplx u1 = u_eps(eps), u2 = u_eps(0.5 * eps);
  PlemeljValue out;
  out.rho = (2.0 * u2.imag() - u1.imag()) / kPi;
  if (!std::isfinite(out.rho)) throw NumericalError("plemelj: non-finite boundary value");
  if (out.rho < -1e-8) {
    std::ostringstream os;
    os << "not a density (rho=" << out.rho << " at x=" << x << ")";
    throw NumericalError(os.str());
  }
  if (edges) out.near_edge = std::min(std::abs(x - edges->first), std::abs(x - edges->second)) < 1e-3;
  return out;
}

void write_grid_csv(const std::string& path, const GridFunction& f) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path);
  os << std::setprecision(17) << "x,value\n";
  for (size_t i = 0; i < f.xs.size(); ++i) os << f.xs[i] << ',' << f.values[i] << '\n';
}

GridFunction read_grid_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  GridFunction f;
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, v;
    if (!(ls >> x >> v)) throw ConfigError("malformed row in " + path);
    f.xs.push_back(x);
    f.values.push_back(v);
  }
  return f;
}

void write_periodic_csv(const std::string& path, const PeriodicCoefficients& c) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path);
  os << std::setprecision(17) << "n,re,im\n";
  for (int n = -c.nmax; n <= c.nmax; ++n) os << n << ',' << c[n].real() << ',' << c[n].imag() << '\n';
}

PeriodicCoefficients read_periodic_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path);
  std::vector<std::pair<int, cplx>> rows;
  std::string line;
  std::getline(is, line);
  int nmax = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    int n;
    double re, im;
    if (!(ls >> n >> re >> im)) throw ConfigError("malformed row in " + path);
    rows.emplace_back(n, cplx(re, im));
    nmax = std::max(nmax, std::abs(n));
  }
  auto c = PeriodicCoefficients::zeros(nmax);
  for (auto& [n, v] : rows) c[n] = v;
  return c;
}

}  // namespace loggas
