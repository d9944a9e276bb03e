#include "tsa/levy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tsa/error.hpp"
#include "tsa/quadrature.hpp"

namespace tsa {

namespace {

using C = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRelTol = 1e-13;
// Beyond this x the integrand of a tail integral is treated as zero.
constexpr double kFarX = 1e150;
// Decay check abscissa for exponential-moment finiteness.
constexpr double kDecayX = 1e12;

// (e^z - 1 - z) / z^2
C small_jump_kernel(C z) {
  if (std::abs(z) < 0.5) {
    C term = 0.5, sum = 0.5;
    for (int k = 3; k < 40; ++k) {
      term *= z / static_cast<double>(k);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

// e^z - 1
C complex_expm1(C z) {
  if (std::abs(z) < 0.5) return z * (1.0 + z * small_jump_kernel(z));
  return std::exp(z) - 1.0;
}

struct SideView {
  const TabulatedTempering& q;
  double alpha;
  double delta;
  double gamma;
};

SideView view(const TSAlphaSpec& spec, Side side) {
  const auto& q = spec.tempering(side);
  return {q, spec.alpha(), spec.delta(side), q.tail_index()};
}

void check_quadrature(bool converged, double abs_error, double scale, const char* who) {
  if (!converged && abs_error > 1e-8 * std::max(1.0, scale)) {
    std::ostringstream os;
    os << who << ": quadrature did not converge (achieved error " << abs_error << ")";
    throw ConvergenceError(os.str(), abs_error);
  }
}

// (delta/alpha) x^{-alpha} int_0^1 exp(lt(t) - gamma (t - x)) dv with t = x v^{-1/alpha};
// returns log of nu([x, inf)) on one side
double side_log_tail(const SideView& s, double x) {
  if (s.delta == 0.0) return -kInf;
  const double inv_alpha = 1.0 / s.alpha;
  auto f = [&](double v) {
    const double t = x * std::pow(v, -inv_alpha);
    if (!(t < kFarX)) return 0.0;
    return std::exp(s.q.log_tilted(t) - s.gamma * (t - x));
  };
  quad::Options opt;
  opt.rel_tol = kRelTol;
  const auto r = quad::integrate(f, 0.0, 1.0, opt);
  check_quadrature(r.converged, r.abs_error / std::max(r.value, 1e-300), 1.0, "levy_tail");
  return std::log(s.delta / s.alpha) - s.alpha * std::log(x) - s.gamma * x + std::log(r.value);
}

// sigma is the exponent seen by this side (s on the plus side, -s on the minus side)
bool side_moment_finite(const SideView& s, double sigma) {
  if (s.delta == 0.0 || sigma <= 0.0) return true;
  auto L = [&](double x) {
    return (sigma - s.gamma) * x + s.q.log_tilted(x) - (1.0 + s.alpha) * std::log(x);
  };
  const double rate = (L(2.0 * kDecayX) - L(kDecayX)) / kDecayX;
  return rate <= 0.0;
}

// int_0^inf (e^{w x} - 1 - w x 1{x<1}) delta q(x) x^{-1-alpha} dx
C side_exponent(const SideView& s, C w) {
  if (s.delta == 0.0 || w == C{}) return {};
  const double a = s.alpha;
  const double sigma = w.real(), u = w.imag();
  const double mag = std::abs(w);
  const double scale = s.delta * std::pow(std::max(1.0, mag), a) * (1.0 / a + 1.0 / (2.0 - a));
  quad::Options opt;
  opt.rel_tol = kRelTol;
  opt.abs_tol = 1e-15 * scale;

  // [0, c] with v = x^{2-alpha}: integrand w^2 K(w x) q(x) / (2 - alpha), bounded
  const double c = std::min(1.0, 1.0 / mag);
  const double inv_2a = 1.0 / (2.0 - a);
  auto small = [&](double v) {
    const double x = std::pow(v, inv_2a);
    return small_jump_kernel(w * x) * std::exp(s.q.log_eval(x));
  };
  const auto ra = quad::integrate(small, 0.0, std::pow(c, 2.0 - a), opt);
  check_quadrature(ra.converged, ra.abs_error, scale, "cumulant (small jumps)");
  C total = ra.value * (w * w * (s.delta * inv_2a));

  // [c, 1] directly, in half-period panels when oscillating
  if (c < 1.0) {
    auto mid = [&](double x) {
      const C z = w * x;
      return (std::exp(z) - 1.0 - z) * std::exp(s.q.log_eval(x) - (1.0 + a) * std::log(x));
    };
    const int panels =
        std::clamp(static_cast<int>(std::ceil((1.0 - c) * std::abs(u) / std::numbers::pi)), 1, 200000);
    const double width = (1.0 - c) / panels;
    quad::Options popt = opt;
    popt.abs_tol = opt.abs_tol / panels;
    C acc{};
    double err = 0.0;
    bool ok = true;
    for (int p = 0; p < panels; ++p) {
      const auto r = quad::integrate(mid, c + p * width, p + 1 == panels ? 1.0 : c + (p + 1) * width, popt);
      acc += r.value;
      err += r.abs_error;
      ok = ok && r.converged;
    }
    check_quadrature(ok, err, scale, "cumulant (intermediate jumps)");
    total += acc * s.delta;
  }

  // [1, X]: (e^{w x} - 1) g(x). Without oscillation, x = v^{-1/alpha} maps
  // [1, inf) onto (0, 1]; otherwise t = log x keeps the cycles near X visible.
  const double inv_a = 1.0 / a;
  const double X = u == 0.0 ? kInf : std::max(1.0, 2.0 * std::numbers::pi / std::abs(u));
  auto jump_factor = [&](double x, double log_weight) -> C {
    const double lt = s.q.log_tilted(x) + log_weight;
    const C z = w * x;
    if (std::abs(z) < 0.5) return std::exp(lt - s.gamma * x) * complex_expm1(z);
    return std::exp(C(lt + (sigma - s.gamma) * x, u * x)) - std::exp(lt - s.gamma * x);
  };
  if (std::isinf(X)) {
    auto big = [&](double v) -> C {
      const double x = std::pow(v, -inv_a);
      if (!(x < kFarX)) return {};
      return jump_factor(x, 0.0);
    };
    const auto rb = quad::integrate(big, 0.0, 1.0, opt);
    check_quadrature(rb.converged, rb.abs_error, scale, "cumulant (large jumps)");
    total += rb.value * (s.delta / a);
  } else if (X > 1.0) {
    auto big = [&](double t) -> C { return jump_factor(std::exp(t), -a * t); };
    const auto rb = quad::integrate(big, 0.0, std::log(X), opt);
    check_quadrature(rb.converged, rb.abs_error, scale, "cumulant (large jumps)");
    total += rb.value * s.delta;
  }

  // [X, inf): int e^{w x} g(x) dx - nu([X, inf))
  if (!std::isinf(X)) {
    auto h = [&](double x) {
      if (!(x < kFarX)) return 0.0;
      return s.delta * std::exp((sigma - s.gamma) * x + s.q.log_tilted(x) - (1.0 + a) * std::log(x));
    };
    const auto rt = quad::fourier_tail(h, u, X, opt);
    check_quadrature(rt.converged, rt.abs_error, scale, "cumulant (oscillatory tail)");
    total += rt.value - std::exp(side_log_tail(s, X));
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// TSAlphaSpec

TSAlphaSpec::TSAlphaSpec(double alpha, double delta_plus, TemperingFunction q_plus,
                         double delta_minus, TemperingFunction q_minus, double drift_b)
    : alpha_(alpha), delta_plus_(delta_plus), delta_minus_(delta_minus), drift_b_(drift_b) {
  validate();
  plus_ = std::make_shared<const TabulatedTempering>(std::move(q_plus));
  minus_ = q_minus == plus_->function()
               ? plus_
               : std::make_shared<const TabulatedTempering>(std::move(q_minus));
  for (Side s : {Side::plus, Side::minus}) {
    const auto& q = tempering(s).function();
    if (delta(s) > 0.0 && q.kind() == TemperingFunction::Kind::kr &&
        std::get<TemperingFunction::KR>(q.params()).alpha != alpha_)
      throw DomainError("kr tempering must use the same alpha as the law");
  }
  cache_ = detail::make_transform_cache();
}

TSAlphaSpec TSAlphaSpec::one_sided(double alpha, double delta, TemperingFunction q,
                                   double drift_b) {
  auto copy = q;
  return TSAlphaSpec(alpha, delta, std::move(q), 0.0, std::move(copy), drift_b);
}

void TSAlphaSpec::validate() const {
  if (!(alpha_ > 0.0 && alpha_ < 2.0)) throw DomainError("alpha must lie strictly inside (0,2)");
  if (!(delta_plus_ >= 0.0) || !std::isfinite(delta_plus_))
    throw DomainError("delta_plus must be finite and >= 0");
  if (!(delta_minus_ >= 0.0) || !std::isfinite(delta_minus_))
    throw DomainError("delta_minus must be finite and >= 0");
  if (!(delta_plus_ + delta_minus_ > 0.0))
    throw DomainError("delta_plus + delta_minus must be > 0");
  if (!std::isfinite(drift_b_)) throw DomainError("drift_b must be finite");
}

double TSAlphaSpec::mgf_upper() const noexcept { return delta_plus_ > 0.0 ? gamma_plus() : kInf; }
double TSAlphaSpec::mgf_lower() const noexcept {
  return delta_minus_ > 0.0 ? -gamma_minus() : -kInf;
}

std::string TSAlphaSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "alpha=" << alpha_ << " delta_plus=" << delta_plus_ << " q_plus=" << q_plus().describe()
     << " delta_minus=" << delta_minus_ << " q_minus=" << q_minus().describe()
     << " drift_b=" << drift_b_;
  return os.str();
}

bool TSAlphaSpec::operator==(const TSAlphaSpec& other) const {
  return alpha_ == other.alpha_ && delta_plus_ == other.delta_plus_ &&
         delta_minus_ == other.delta_minus_ && drift_b_ == other.drift_b_ &&
         q_plus() == other.q_plus() && q_minus() == other.q_minus();
}

TSAlphaSpec reflect(const TSAlphaSpec& spec) {
  TSAlphaSpec r;
  r.alpha_ = spec.alpha_;
  r.delta_plus_ = spec.delta_minus_;
  r.delta_minus_ = spec.delta_plus_;
  r.drift_b_ = -spec.drift_b_;
  r.plus_ = spec.minus_;
  r.minus_ = spec.plus_;
  r.cache_ = detail::make_transform_cache();
  return r;
}

// ---------------------------------------------------------------------------
// Lévy density and tails

double levy_density(const TSAlphaSpec& spec, double x) {
  if (x == 0.0 || std::isnan(x)) throw DomainError("levy_density: x must be nonzero");
  const Side side = x > 0.0 ? Side::plus : Side::minus;
  const double d = spec.delta(side);
  if (d == 0.0) return 0.0;
  const double ax = std::abs(x);
  return d * std::exp(spec.tempering(side).log_eval(ax) - (1.0 + spec.alpha()) * std::log(ax));
}

double log_levy_tail(const TSAlphaSpec& spec, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("levy_tail: x must be finite and > 0");
  return side_log_tail(view(spec, Side::plus), x);
}

double levy_tail(const TSAlphaSpec& spec, double x) { return std::exp(log_levy_tail(spec, x)); }

Nu1Law make_nu1(const TSAlphaSpec& spec) {
  if (spec.delta_plus() == 0.0) throw DomainError("nu1 needs delta_plus > 0");
  return Nu1Law{spec, levy_tail(spec, 1.0)};
}

double nu1_density(const Nu1Law& n, double x) {
  if (!(x > 1.0)) return 0.0;
  return levy_density(n.parent, x) / n.normalizer;
}

double nu1_tail(const Nu1Law& n, double x) {
  if (!(x > 1.0)) return 1.0;
  return std::exp(log_levy_tail(n.parent, x) - std::log(n.normalizer));
}

double nu1_mgf(const Nu1Law& n, double s) {
  if (s == 0.0) return 1.0;
  const auto sv = view(n.parent, Side::plus);
  if (!side_moment_finite(sv, s)) return kInf;
  const double inv_a = 1.0 / sv.alpha;
  auto f = [&](double v) {
    const double x = std::pow(v, -inv_a);
    if (!(x < kFarX)) return 0.0;
    return std::exp((s - sv.gamma) * x + sv.q.log_tilted(x));
  };
  quad::Options opt;
  opt.rel_tol = kRelTol;
  const auto r = quad::integrate(f, 0.0, 1.0, opt);
  check_quadrature(r.converged, r.abs_error / std::max(r.value, 1e-300), 1.0, "nu1_mgf");
  return sv.delta / sv.alpha * r.value / n.normalizer;
}

// ---------------------------------------------------------------------------
// Cumulant

bool side_exponential_moment_finite(const TSAlphaSpec& spec, Side side, double s) {
  return side_moment_finite(view(spec, side), side == Side::plus ? s : -s);
}

C complex_cumulant(const TSAlphaSpec& spec, C w) {
  const double s = w.real();
  if (!std::isfinite(s) || !std::isfinite(w.imag()))
    throw DomainError("cumulant: argument must be finite");
  if (s > spec.mgf_upper() || s < spec.mgf_lower()) {
    std::ostringstream os;
    os << "cumulant: Re w = " << s << " outside the m.g.f. domain [" << spec.mgf_lower() << ", "
       << spec.mgf_upper() << "]";
    throw DomainError(os.str());
  }
  return w * spec.drift_b() + side_exponent(view(spec, Side::plus), w) +
         side_exponent(view(spec, Side::minus), -w);
}

C characteristic_exponent(const TSAlphaSpec& spec, double u) {
  return complex_cumulant(spec, C(0.0, u));
}

double cumulant(const TSAlphaSpec& spec, double s) {
  if (std::isnan(s)) throw DomainError("cumulant: s is NaN");
  if (!side_exponential_moment_finite(spec, Side::plus, s) ||
      !side_exponential_moment_finite(spec, Side::minus, s) || s > spec.mgf_upper() ||
      s < spec.mgf_lower())
    return kInf;
  return complex_cumulant(spec, C(s, 0.0)).real();
}

double mgf(const TSAlphaSpec& spec, double s) { return std::exp(cumulant(spec, s)); }

}  // namespace tsa
