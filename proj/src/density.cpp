#include "tsa/density.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include "tsa/error.hpp"
#include "tsa/quadrature.hpp"

namespace tsa {

namespace {

using C = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxGrid = std::size_t{1} << 24;

// the planner is not thread-safe
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// candidate tilts for the Chernoff bound on one side: geometric towards 0
std::vector<double> chernoff_tilts(double edge) {
  const double top = std::isfinite(edge) ? std::abs(edge) : 64.0;
  std::vector<double> s;
  for (int k = 0; k <= 96; ++k) s.push_back(top * std::exp2(-0.25 * k));
  return s;
}

// smallest x with e^{kappa(s) - s x} <= level for some s > 0; nan when the
// right side has no exponential moments
double chernoff_edge(const TSAlphaSpec& spec, double level) {
  const double edge = spec.mgf_upper();
  if (!(edge > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double L = -std::log(level);
  double best = kInf;
  for (double s : chernoff_tilts(edge)) {
    const double k = cumulant(spec, s);
    if (std::isfinite(k)) best = std::min(best, (k + L) / s);
  }
  return best;
}

// x with nu([x, inf)) = level, by bisection in log x
double levy_tail_edge(const TSAlphaSpec& spec, double level) {
  const double target = std::log(level);
  double lo = 0.0, hi = std::log(1e15);
  if (log_levy_tail(spec, std::exp(lo)) <= target) return 1.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (log_levy_tail(spec, std::exp(mid)) > target ? lo : hi) = mid;
  }
  return std::exp(hi);
}

double upper_edge(const TSAlphaSpec& spec, double level, double centre) {
  if (spec.delta_plus() == 0.0 && !(spec.mgf_upper() > 0.0)) return centre;
  const double c = chernoff_edge(spec, level);
  if (!std::isnan(c)) return c;
  return std::max(centre, 0.0) + levy_tail_edge(spec, level);
}

// bound on P(X > x) used for the aliasing estimate
double upper_tail_bound(const TSAlphaSpec& spec, double x, double centre) {
  if (x <= centre) return 1.0;
  const double edge = spec.mgf_upper();
  if (edge > 0.0) {
    double best = 0.0;
    for (double s : chernoff_tilts(edge)) {
      const double k = cumulant(spec, s);
      if (std::isfinite(k)) best = std::min(best, k - s * x);
    }
    return std::exp(best);
  }
  if (spec.delta_plus() == 0.0) return 0.0;
  return std::min(1.0, levy_tail(spec, std::max(x - std::max(centre, 0.0), 1.0)));
}

double centre_of(const TSAlphaSpec& spec) { return Inverter(spec, 1).centre(); }

// (1/pi) int_u^inf |c.f.|, from the untilted table
double cf_tail(const TiltTable& table, double u) {
  if (u >= table.u_hi) return std::exp(table.decay_at_u_hi) * table.u_hi / std::numbers::pi;
  static const quad::GaussLegendre gl(16);
  const int panels = 64;
  const double h = (table.u_hi - u) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = u + (p + 0.5) * h;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i)
      sum += 0.5 * h * gl.weights[i] * std::exp(table(mid + 0.5 * h * gl.nodes[i]).real());
  }
  return (sum + std::exp(table.decay_at_u_hi) * table.u_hi) / std::numbers::pi;
}

// smallest Nyquist frequency (among u_hi / 2^k) whose c.f. tail is below accuracy
double required_nyquist(const TiltTable& table, double accuracy) {
  double u = table.u_hi;
  while (u > 1e-3 && cf_tail(table, 0.5 * u) <= accuracy) u *= 0.5;
  return u;
}

std::size_t pow2_at_least(double v) {
  if (!(v < static_cast<double>(kMaxGrid))) return kMaxGrid * 2;
  return std::bit_ceil(std::max<std::size_t>(1024, static_cast<std::size_t>(std::ceil(v))));
}

void require_converged(const InversionResult& r, const char* what, double x) {
  if (r.converged) return;
  std::ostringstream os;
  os << what << ": relative accuracy " << r.rel_error << " at x=" << x
     << " (partial value " << r.value << ")";
  throw ConvergenceError(os.str(), r.rel_error);
}

void check_tol(double tol) {
  if (!(tol >= 1e-12)) throw DomainError("tol must be >= 1e-12");
}

}  // namespace

double DensityGrid::mass() const {
  double m = 0.0;
  for (double p : pdf_values) m += p;
  return m * dx;
}

double DensityGrid::mean() const {
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) m += x(j) * pdf_values[j];
  return m * dx;
}

double DensityGrid::median() const {
  for (std::size_t j = 1; j < n; ++j) {
    if (sf_values[j] > 0.5) continue;
    // cubic Hermite on the cell using sf' = -pdf, then Newton from the
    // linear guess
    const double f0 = sf_values[j - 1], f1 = sf_values[j];
    const double d0 = -pdf_values[j - 1] * dx, d1 = -pdf_values[j] * dx;
    auto H = [&](double t) {
      const double t2 = t * t, t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * f1 +
             (t3 - t2) * d1;
    };
    auto dH = [&](double t) {
      const double t2 = t * t;
      return (6 * t2 - 6 * t) * f0 + (3 * t2 - 4 * t + 1) * d0 + (-6 * t2 + 6 * t) * f1 +
             (3 * t2 - 2 * t) * d1;
    };
    double t = f0 == f1 ? 0.0 : (f0 - 0.5) / (f0 - f1);
    for (int i = 0; i < 20; ++i) {
      const double d = dH(t);
      if (d == 0.0) break;
      const double step = (H(t) - 0.5) / d;
      t = std::clamp(t - step, 0.0, 1.0);
      if (std::abs(step) < 1e-15) break;
    }
    return x(j - 1) + t * dx;
  }
  return x(n - 1);
}

std::pair<double, double> auto_domain(const TSAlphaSpec& spec, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("auto_domain: level must lie in (0,1)");
  const double centre = centre_of(spec);
  const double hi = upper_edge(spec, level, centre);
  const double lo = -upper_edge(reflect(spec), level, -centre);
  return {lo, hi};
}

DensityGrid pdf_grid(const TSAlphaSpec& spec, double a, double b, std::size_t n, double accuracy) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("pdf_grid: need finite a < b");
  if (n < 1024 || !std::has_single_bit(n)) throw DomainError("pdf_grid: n must be a power of two >= 1024");

  const auto table = spec.transform_cache().table(spec, 0.0);
  DensityGrid g;
  g.x0 = a;
  g.n = n;
  g.dx = (b - a) / static_cast<double>(n);
  const double du = 2.0 * std::numbers::pi / (static_cast<double>(n) * g.dx);
  const double nyquist = std::numbers::pi / g.dx;

  g.truncation_error_estimate = cf_tail(*table, nyquist);
  if (g.truncation_error_estimate > accuracy) {
    const std::size_t need = pow2_at_least((b - a) * required_nyquist(*table, accuracy) / std::numbers::pi);
    std::ostringstream os;
    os << "pdf_grid: characteristic function has not decayed at n=" << n << " (tail "
       << g.truncation_error_estimate << "); need n >= " << need;
    throw ConvergenceError(os.str(), g.truncation_error_estimate);
  }

  // second transform with the cell-average factor (1 - e^{-iu dx})/(iu dx)
  // gives the exact mass of each cell [x_j, x_j + dx) for the sf column
  fftw_complex* buf = fftw_alloc_complex(2 * n);
  fftw_complex* cell = buf + n;
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = static_cast<double>(static_cast<std::ptrdiff_t>(k) - half) * du;
    const C e = std::exp(table->operator()(std::abs(u)));
    const C phi = u < 0.0 ? std::conj(e) : e;
    const C v = phi * std::polar(1.0, -u * a);
    const double h = u * g.dx;
    const C avg = h == 0.0 ? C(1.0) : (1.0 - std::polar(1.0, -h)) / C(0.0, h);
    const C w = v * avg;
    buf[k][0] = v.real();
    buf[k][1] = v.imag();
    cell[k][0] = w.real();
    cell[k][1] = w.imag();
  }
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    const int len = static_cast<int>(n);
    fftw_plan plan = fftw_plan_many_dft(1, &len, 2, buf, nullptr, 1, len, buf, nullptr, 1, len,
                                        FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  g.pdf_values.resize(n);
  g.sf_values.resize(n);
  const double scale = du / (2.0 * std::numbers::pi);
  double acc = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    const double sgn = j % 2 ? -scale : scale;
    g.pdf_values[j] = sgn * buf[j][0];
    acc += g.dx * sgn * cell[j][0];
    g.sf_values[j] = acc;
  }
  fftw_free(buf);

  const double centre = centre_of(spec);
  const double span_end = a + static_cast<double>(n) * g.dx;
  g.aliasing_error_estimate =
      upper_tail_bound(spec, span_end, centre) + upper_tail_bound(reflect(spec), -a, -centre);
  return g;
}

DensityGrid pdf_grid_auto(const TSAlphaSpec& spec, double level) {
  const auto [a, b] = auto_domain(spec, level);
  const auto table = spec.transform_cache().table(spec, 0.0);
  // ringing is a fraction of the c.f. tail; keep it under the -1e-10 floor
  const double cf_level = std::min(level, 1e-11);
  const std::size_t n = pow2_at_least((b - a) * required_nyquist(*table, cf_level) / std::numbers::pi);
  if (n > kMaxGrid) {
    std::ostringstream os;
    os << "pdf_grid_auto: domain [" << a << ", " << b << "] needs more than " << kMaxGrid
       << " points";
    throw ConvergenceError(os.str(), kInf);
  }
  return pdf_grid(spec, a, b, n, cf_level);
}

std::vector<InversionResult> pdf_points(const TSAlphaSpec& spec, std::span<const double> xs,
                                        double tol) {
  check_tol(tol);
  return Inverter(spec, 1).evaluate(InversionTarget::pdf, xs, tol);
}

std::vector<InversionResult> sf_points(const TSAlphaSpec& spec, std::span<const double> xs,
                                       double tol) {
  check_tol(tol);
  return Inverter(spec, 1).evaluate(InversionTarget::sf, xs, tol);
}

std::vector<InversionResult> convolution_sf_points(const TSAlphaSpec& spec,
                                                   std::span<const double> xs, double tol) {
  check_tol(tol);
  return Inverter(spec, 2).evaluate(InversionTarget::sf, xs, tol);
}

double pdf_point(const TSAlphaSpec& spec, double x, double tol) {
  const auto r = pdf_points(spec, std::span<const double>(&x, 1), tol).front();
  require_converged(r, "pdf_point", x);
  return r.value;
}

double sf_point(const TSAlphaSpec& spec, double x, double tol) {
  const auto r = sf_points(spec, std::span<const double>(&x, 1), tol).front();
  require_converged(r, "sf_point", x);
  return r.value;
}

double convolution_sf(const TSAlphaSpec& spec, double x, double tol) {
  const auto r = convolution_sf_points(spec, std::span<const double>(&x, 1), tol).front();
  require_converged(r, "convolution_sf", x);
  return r.value;
}

}  // namespace tsa
