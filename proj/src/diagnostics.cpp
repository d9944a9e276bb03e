#include "tsa/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tsa/density.hpp"
#include "tsa/error.hpp"
#include "tsa/quadrature.hpp"
#include "tsa/special_functions.hpp"

namespace tsa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// gaps may wobble by this much and still count as non-increasing
constexpr double kGapSlack = 1e-9;

void require_ascending(std::span<const double> xs, const char* what) {
  if (xs.empty()) throw DomainError(std::string(what) + ": empty grid");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw DomainError(std::string(what) + ": xs must be ascending");
}

RatioCurve start(const char* name, std::span<const double> xs, double target, double tol) {
  RatioCurve c;
  c.name = name;
  c.xs.assign(xs.begin(), xs.end());
  c.target = target;
  c.tolerance = tol;
  return c;
}

// log of int_X^{2X} exp(l(x)) dx in the variable log x, summed in log space
double log_increment(const std::function<double(double)>& l, double X) {
  static const quad::GaussLegendre gl(32);
  const double a = std::log(X), h = std::numbers::ln2;
  std::vector<double> terms;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double t = a + 0.5 * h * (1.0 + gl.nodes[i]);
    terms.push_back(std::log(0.5 * h * gl.weights[i]) + l(std::exp(t)) + t);
  }
  const double m = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(m)) return m;
  double sum = 0.0;
  for (double v : terms) sum += std::exp(v - m);
  return m + std::log(sum);
}

// does int_1^inf exp(l(x)) dx converge? Successive doubling increments must
// shrink geometrically far out.
bool tail_integral_finite(const std::function<double(double)>& l) {
  double prev = log_increment(l, 1e6);
  for (double X = 2e6; X <= 1.7e7; X *= 2.0) {
    const double cur = log_increment(l, X);
    if (cur == -kInf) return true;
    if (!(cur - prev < -0.01)) return false;
    prev = cur;
  }
  return true;
}

// log nu(x) on the plus side, without delta
std::function<double(double)> log_plus_density(const TSAlphaSpec& spec) {
  const auto& q = spec.tempering(Side::plus);
  const double a = spec.alpha();
  return [&q, a](double x) { return q.log_eval(x) - (1.0 + a) * std::log(x); };
}

}  // namespace

std::vector<double> RatioCurve::rel_gaps() const {
  std::vector<double> g;
  g.reserve(values.size());
  for (double v : values) g.push_back(std::abs(v / target - 1.0));
  return g;
}

void classify(RatioCurve& c) {
  const std::size_t n = c.values.size();
  c.converged = false;
  c.divergent = n >= 2 && c.values.back() > RatioCurve::kDivergenceFactor * c.values.front();
  if (n == 0) {
    c.last_rel_gap = kNaN;
    return;
  }
  c.last_rel_gap = std::isinf(c.target) ? 1.0 : std::abs(c.values.back() / c.target - 1.0);
  if (std::isinf(c.target)) {
    c.converged = c.divergent;
    return;
  }
  if (c.inconclusive || n < 3) return;
  const auto g = c.rel_gaps();
  bool ok = true;
  for (std::size_t i = n - 3; i < n; ++i) ok = ok && g[i] < c.tolerance;
  ok = ok && g[n - 2] <= g[n - 3] + kGapSlack && g[n - 1] <= g[n - 2] + kGapSlack;
  c.converged = ok;
}

RatioCurve class_l_curve(const TSAlphaSpec& spec, double y, std::span<const double> xs,
                         double point_tol) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("class_l_curve: y must be >= 0");
  require_ascending(xs, "class_l_curve");
  RatioCurve c = start("class_l", xs, std::exp(-spec.gamma_plus() * y), kInversionCurveTol);
  std::vector<double> pts(xs.begin(), xs.end());
  for (double x : xs) pts.push_back(x + y);
  const auto r = sf_points(spec, pts, point_tol);
  const std::size_t n = xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& lo = r[i];
    const auto& hi = r[n + i];
    if (!lo.converged || !hi.converged) c.inconclusive = true;
    c.values.push_back(y == 0.0 ? 1.0 : std::exp(hi.log_value - lo.log_value));
  }
  if (c.inconclusive) c.note = "survival function not resolved at some x";
  classify(c);
  return c;
}

double nu1_convolution_integrand(const TSAlphaSpec& spec, double x, double z) {
  const auto& q = spec.tempering(Side::plus);
  const double a = spec.alpha();
  const double w = x - z;
  const double lg = (1.0 + a) * (std::log(x) - std::log(w) - std::log(z)) + q.log_tilted(w) +
                    q.log_tilted(z) - q.log_tilted(x);
  return std::exp(lg);
}

double nu1_dominating_bound(const TSAlphaSpec& spec, double z) {
  const auto& q = spec.tempering(Side::plus);
  const double a = spec.alpha();
  return std::exp((1.0 + a) * std::log(2.0 / z) + 2.0 * q.log_tilted(z) - q.log_tilted(2.0 * z));
}

double nu1_convolution_ratio(const TSAlphaSpec& spec, double x, bool symmetric) {
  if (symmetric ? !(x >= 4.0) : !(x > 2.0))
    throw DomainError("nu1_convolution_ratio: x too small for the integration range");
  const Nu1Law nu1 = make_nu1(spec);
  auto f = [&](double z) { return nu1_convolution_integrand(spec, x, z); };
  quad::Options opt;
  opt.rel_tol = 1e-11;
  const auto r = symmetric ? quad::integrate(f, 1.0, 0.5 * x, opt)
                           : quad::integrate(f, 1.0, x - 1.0, opt);
  if (!r.converged)
    throw ConvergenceError("nu1_convolution_ratio: quadrature did not converge", r.abs_error);
  return (symmetric ? 2.0 : 1.0) * spec.delta_plus() / nu1.normalizer * r.value;
}

RatioCurve conv_equiv_nu1_curve(const TSAlphaSpec& spec, std::span<const double> xs) {
  require_ascending(xs, "conv_equiv_nu1_curve");
  if (xs.front() < 4.0) throw DomainError("conv_equiv_nu1_curve: xs must be >= 4");
  const Nu1Law nu1 = make_nu1(spec);
  RatioCurve c = start("conv_equiv_nu1", xs, 2.0 * nu1_mgf(nu1, spec.gamma_plus()),
                       kQuadratureCurveTol);
  for (double x : xs) {
    try {
      c.values.push_back(nu1_convolution_ratio(spec, x));
    } catch (const ConvergenceError& e) {
      c.values.push_back(kNaN);
      c.inconclusive = true;
      c.note = e.what();
    }
  }
  classify(c);
  return c;
}

RawLaw exponential_law(double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential_law: rate must be > 0");
  RawLaw law;
  law.name = "exponential";
  law.log_sf = [rate](double x) { return x <= 0.0 ? 0.0 : -rate * x; };
  law.log_pdf = [rate](double x) { return x < 0.0 ? -kInf : std::log(rate) - rate * x; };
  // the sum of two is Gamma(2, rate)
  law.log_conv_sf = [rate](double x) { return x <= 0.0 ? 0.0 : std::log1p(rate * x) - rate * x; };
  law.gamma = rate;
  law.mgf_at_gamma = kInf;
  return law;
}

RawLaw gamma_law(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("gamma_law: shape and rate must be > 0");
  auto log_q = [](double a, double x) {
    return log_upper_incomplete_gamma(a, x, 1e-14) - std::lgamma(a);
  };
  RawLaw law;
  law.name = "gamma";
  law.log_sf = [=](double x) { return x <= 0.0 ? 0.0 : log_q(shape, rate * x); };
  law.log_pdf = [=](double x) {
    if (x <= 0.0) return -kInf;
    return shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x - std::lgamma(shape);
  };
  law.log_conv_sf = [=](double x) { return x <= 0.0 ? 0.0 : log_q(2.0 * shape, rate * x); };
  law.gamma = rate;
  law.mgf_at_gamma = kInf;
  return law;
}

RatioCurve conv_equiv_dist_curve(const TSAlphaSpec& spec, std::span<const double> xs,
                                 double point_tol) {
  require_ascending(xs, "conv_equiv_dist_curve");
  RatioCurve c =
      start("conv_equiv_dist", xs, 2.0 * mgf(spec, spec.gamma_plus()), kInversionCurveTol);
  const auto one = sf_points(spec, xs, point_tol);
  const auto two = convolution_sf_points(spec, xs, point_tol);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!one[i].converged || !two[i].converged) c.inconclusive = true;
    c.values.push_back(std::exp(two[i].log_value - one[i].log_value));
  }
  if (c.inconclusive) c.note = "tail below the resolvable range at some x";
  classify(c);
  return c;
}

RatioCurve conv_equiv_dist_curve(const RawLaw& law, std::span<const double> xs) {
  require_ascending(xs, "conv_equiv_dist_curve");
  RatioCurve c = start("conv_equiv_dist", xs, 2.0 * law.mgf_at_gamma, kInversionCurveTol);
  for (double x : xs) c.values.push_back(std::exp(law.log_conv_sf(x) - law.log_sf(x)));
  c.note = "control law: " + law.name;
  classify(c);
  return c;
}

RatioCurve corollary_tail_curve(const TSAlphaSpec& spec, Side side, std::span<const double> xs,
                                double point_tol) {
  if (side == Side::minus) {
    RatioCurve c = corollary_tail_curve(reflect(spec), Side::plus, xs, point_tol);
    c.name = "corollary_tail_minus";
    return c;
  }
  require_ascending(xs, "corollary_tail_curve");
  if (!(xs.front() > 0.0)) throw DomainError("corollary_tail_curve: xs must be > 0");
  if (spec.delta_plus() == 0.0) throw DomainError("corollary_tail_curve: side has no jumps");
  RatioCurve c = start("corollary_tail_plus", xs, mgf(spec, spec.gamma_plus()),
                       kInversionCurveTol);
  const auto& q = spec.tempering(Side::plus);
  const auto r = pdf_points(spec, xs, point_tol);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    if (!r[i].converged) c.inconclusive = true;
    c.values.push_back(std::exp(r[i].log_value + (1.0 + spec.alpha()) * std::log(x) -
                                std::log(spec.delta_plus()) - q.log_eval(x)));
  }
  if (c.inconclusive) c.note = "density not resolved at some x";
  classify(c);
  return c;
}

RatioCurve gamma_counterexample_curve(double shape, double rate, std::span<const double> xs) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw DomainError("gamma_counterexample_curve: shape and rate must be > 0");
  if (shape == 1.0) throw DomainError("gamma_counterexample_curve: shape 1 gives a constant ratio");
  require_ascending(xs, "gamma_counterexample_curve");
  if (!(xs.front() > 0.0)) throw DomainError("gamma_counterexample_curve: xs must be > 0");
  RatioCurve c = start("gamma_counterexample", xs, kInf, kInversionCurveTol);
  const double lc = shape * std::log(rate) - std::log(shape) - std::lgamma(shape);
  for (double x : xs) c.values.push_back(std::exp(lc + shape * std::log(x)));
  classify(c);
  return c;
}

std::vector<double> default_moment_grid(const TSAlphaSpec& spec) {
  const double top = spec.gamma_plus() > 0.0 ? 2.0 * spec.gamma_plus() : 1.0;
  return make_grid(0.0, top, 21, false);
}

bool absolute_moment_finite(const TSAlphaSpec& spec, int order) {
  if (order < 0) throw DomainError("absolute_moment_finite: order must be >= 0");
  for (const auto& sp : {spec, reflect(spec)}) {
    if (sp.delta_plus() == 0.0 || sp.gamma_plus() > 0.0) continue;
    const auto ld = log_plus_density(sp);
    auto l = [&](double x) { return order * std::log(x) + ld(x); };
    if (!tail_integral_finite(l)) return false;
  }
  return true;
}

MomentReport moment_cross_check(const TSAlphaSpec& spec, std::span<const double> s_grid) {
  MomentReport rep;
  const auto ld = log_plus_density(spec);
  for (double s : s_grid) {
    MomentCheckRow row;
    row.s = s;
    row.mgf_finite = std::isfinite(cumulant(spec, s));
    if (s == 0.0 || spec.delta_plus() == 0.0) {
      row.nu1_mgf_finite = true;
    } else {
      auto l = [&](double x) { return s * x + ld(x); };
      row.nu1_mgf_finite = s < 0.0 || tail_integral_finite(l);
    }
    if (row.mgf_finite != row.nu1_mgf_finite) ++rep.disagreements;
    rep.rows.push_back(row);
  }
  rep.mean_finite = absolute_moment_finite(spec, 1);
  rep.variance_finite = absolute_moment_finite(spec, 2);
  return rep;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<double> make_grid(double a, double b, int n, bool log_spacing) {
  if (n < 1) throw DomainError("make_grid: n must be >= 1");
  if (!(b >= a)) throw DomainError("make_grid: need a <= b");
  if (log_spacing && !(a > 0.0)) throw DomainError("make_grid: log spacing needs a > 0");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
    g[i] = log_spacing ? std::exp(std::log(a) + t * (std::log(b) - std::log(a)))
                       : a + t * (b - a);
  }
  g.back() = b;
  return g;
}

ReportConfig default_report_config(const TSAlphaSpec& spec) {
  ReportConfig cfg;
  const double g = spec.gamma_plus();
  if (g > 0.0) {
    const double scale = 1.0 / std::min(g, 1.0);
    cfg.xs_survival = make_grid(4.0 * scale, 600.0 * scale, 24, true);
    cfg.xs_density = make_grid(8.0 * scale, 400.0 * scale, 24, true);
    cfg.xs_nu1 = make_grid(10.0, 1000.0 * scale, 24, true);
  } else {
    cfg.xs_survival = make_grid(10.0, 2e3, 16, true);
    cfg.xs_density = make_grid(10.0, 2e3, 16, true);
    cfg.xs_nu1 = make_grid(10.0, 1e4, 20, true);
  }
  return cfg;
}

Verdict verdict_of(const std::vector<RatioCurve>& curves) {
  bool all = !curves.empty();
  for (const auto& c : curves) {
    if (c.divergent) return Verdict::inconsistent;
    all = all && c.converged;
  }
  return all ? Verdict::consistent : Verdict::inconclusive;
}

const RatioCurve* DiagnosticsReport::curve(const std::string& name) const {
  for (const auto& c : curves)
    if (c.name == name) return &c;
  return nullptr;
}

DiagnosticsReport run_full_report(const TSAlphaSpec& spec, const ReportConfig& cfg) {
  DiagnosticsReport rep;
  rep.spec_echo = spec.describe();
  rep.gamma_plus = spec.gamma_plus();
  rep.gamma_minus = spec.gamma_minus();

  auto attempt = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      rep.failures.push_back(std::string(what) + ": " + e.what());
    }
  };

  attempt("constants", [&] {
    rep.constants["mgf_at_gamma"] = mgf(spec, spec.gamma_plus());
    if (spec.delta_plus() > 0.0)
      rep.constants["two_nu1_mgf"] = 2.0 * nu1_mgf(make_nu1(spec), spec.gamma_plus());
    rep.constants["corollary_constant_plus"] = mgf(spec, spec.gamma_plus());
    const TSAlphaSpec r = reflect(spec);
    rep.constants["corollary_constant_minus"] = mgf(r, r.gamma_plus());
  });

  if (spec.delta_plus() > 0.0) {
    attempt("class_l", [&] { rep.curves.push_back(class_l_curve(spec, cfg.y, cfg.xs_survival, cfg.point_tol)); });
    attempt("conv_equiv_nu1", [&] { rep.curves.push_back(conv_equiv_nu1_curve(spec, cfg.xs_nu1)); });
    attempt("conv_equiv_dist", [&] {
      rep.curves.push_back(conv_equiv_dist_curve(spec, cfg.xs_survival, cfg.point_tol));
    });
    attempt("corollary_tail_plus", [&] {
      rep.curves.push_back(corollary_tail_curve(spec, Side::plus, cfg.xs_density, cfg.point_tol));
    });
  }
  if (spec.delta_minus() > 0.0) {
    attempt("corollary_tail_minus", [&] {
      rep.curves.push_back(corollary_tail_curve(spec, Side::minus, cfg.xs_density, cfg.point_tol));
    });
  }
  if (cfg.gamma_counterexample) {
    attempt("gamma_counterexample", [&] {
      const auto [a, b] = *cfg.gamma_counterexample;
      rep.curves.push_back(gamma_counterexample_curve(a, b, cfg.xs_density));
    });
  }
  attempt("moments", [&] { rep.moments = moment_cross_check(spec, default_moment_grid(spec)); });
  if (rep.moments.disagreements > 0)
    rep.failures.push_back("moment cross-check: " + std::to_string(rep.moments.disagreements) +
                           " disagreements");

  rep.verdict = verdict_of(rep.curves);
  if (!rep.failures.empty() && rep.verdict == Verdict::consistent) rep.verdict = Verdict::inconclusive;
  return rep;
}

}  // namespace tsa
