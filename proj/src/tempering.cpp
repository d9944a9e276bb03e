#include "tsa/tempering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "tsa/error.hpp"
#include "tsa/quadrature.hpp"
#include "tsa/special_functions.hpp"

namespace tsa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Internal accuracy for special-function calls inside q.
constexpr double kEvalTol = 1e-13;

void require_positive_x(double x, const char* who) {
  if (!(x > 0.0) || std::isnan(x)) {
    std::ostringstream os;
    os << who << ": x must be > 0, got " << x;
    throw DomainError(os.str());
  }
}

double log_sum_exp_tilted(const std::vector<Atom>& atoms, double gamma, double x) {
  // log sum w e^{-(s-gamma) x}; the atom at gamma contributes log w exactly
  double best = -kInf;
  for (const auto& a : atoms) best = std::max(best, std::log(a.mass) - (a.location - gamma) * x);
  double acc = 0.0;
  for (const auto& a : atoms) acc += std::exp(std::log(a.mass) - (a.location - gamma) * x - best);
  return best + std::log(acc);
}

}  // namespace

// ---------------------------------------------------------------------------
// BernsteinMeasure

BernsteinMeasure BernsteinMeasure::from_atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw InvalidTempering("bernstein measure: no atoms");
  double mass = 0.0, gamma = kInf;
  for (const auto& a : atoms) {
    if (!(a.location >= 0.0) || !std::isfinite(a.location))
      throw InvalidTempering("bernstein measure: atom location must be finite and >= 0");
    if (!(a.mass > 0.0) || !std::isfinite(a.mass))
      throw InvalidTempering("bernstein measure: atom mass must be finite and > 0");
    mass += a.mass;
    gamma = std::min(gamma, a.location);
  }
  BernsteinMeasure m;
  m.rep_ = Representation::atoms;
  m.gamma_ = gamma;
  m.total_mass_ = mass;
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& l, const Atom& r) { return l.location < r.location; });
  m.atoms_ = std::move(atoms);
  return m;
}

BernsteinMeasure BernsteinMeasure::from_density(std::function<double(double)> rho, double gamma) {
  if (!rho) throw InvalidTempering("bernstein measure: empty density");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw InvalidTempering("bernstein measure: support infimum must be finite and >= 0");
  BernsteinMeasure m;
  m.rep_ = Representation::density;
  m.gamma_ = gamma;
  m.density_ = std::move(rho);
  m.total_mass_ = m.tilted_density_transform(0.0);
  if (!(m.total_mass_ > 0.0) || !std::isfinite(m.total_mass_))
    throw InvalidTempering("bernstein measure: density has no finite positive mass");
  return m;
}

BernsteinMeasure BernsteinMeasure::implicit(double gamma, double total_mass) {
  BernsteinMeasure m;
  m.rep_ = Representation::implicit;
  m.gamma_ = gamma;
  m.total_mass_ = total_mass;
  return m;
}

double BernsteinMeasure::tilted_density_transform(double x) const {
  // int_0^inf e^{-u x} rho(gamma + u) du, truncated once further panels
  // contribute below 1e-12 of the value
  auto f = [&](double u) { return std::exp(-u * x) * density_(gamma_ + u); };
  quad::Options opt;
  opt.rel_tol = 1e-13;
  const double width0 = 1.0 / (1.0 + x);
  auto r = quad::integrate_doubling(f, 0.0, width0, opt);
  return r.value;
}

double BernsteinMeasure::laplace(double x) const {
  switch (rep_) {
    case Representation::atoms: {
      double v = 0.0;
      for (const auto& a : atoms_) v += a.mass * std::exp(-a.location * x);
      return v;
    }
    case Representation::density:
      return std::exp(-gamma_ * x) * tilted_density_transform(x);
    case Representation::implicit:
      break;
  }
  throw DomainError("bernstein measure: implicit representation has no Laplace transform");
}

double BernsteinMeasure::log_laplace_tilted(double x) const {
  switch (rep_) {
    case Representation::atoms:
      return log_sum_exp_tilted(atoms_, gamma_, x);
    case Representation::density:
      return std::log(tilted_density_transform(x));
    case Representation::implicit:
      break;
  }
  throw DomainError("bernstein measure: implicit representation has no Laplace transform");
}

// ---------------------------------------------------------------------------
// TemperingFunction

TemperingFunction::TemperingFunction(Params params, double gamma)
    : params_(std::move(params)), gamma_(gamma) {
  const auto check = check_proper([this](double x) { return eval(x); });
  if (!check.passed) {
    std::ostringstream os;
    os << "tempering function " << describe() << " is not proper: q(0+) extrapolates to "
       << check.extrapolated;
    throw InvalidTempering(os.str());
  }
}

TemperingFunction TemperingFunction::exponential(double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta))
    throw InvalidTempering("exponential tempering: theta must be finite and > 0");
  return TemperingFunction(Exponential{theta}, theta);
}

TemperingFunction TemperingFunction::kr(double alpha, double p, double r) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw InvalidTempering("kr tempering: alpha must lie strictly inside (0,2)");
  if (!(p > -alpha) || !std::isfinite(p))
    throw InvalidTempering("kr tempering: p must satisfy p > -alpha");
  if (!(r > 0.0) || !std::isfinite(r))
    throw InvalidTempering("kr tempering: r must be finite and > 0");
  const double order = alpha + p;
  if (order == std::floor(order))
    throw InvalidTempering("kr tempering: alpha + p must not be an integer");
  return TemperingFunction(KR{alpha, p, r}, 1.0 / r);
}

TemperingFunction TemperingFunction::gtgs(double theta, double lambda, double gamma_ml) {
  if (!(theta >= 0.0) || !std::isfinite(theta))
    throw InvalidTempering("gtgs tempering: theta must be finite and >= 0");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw InvalidTempering("gtgs tempering: lambda must be finite and > 0");
  if (!(gamma_ml > 0.0 && gamma_ml < 1.0))
    throw InvalidTempering("gtgs tempering: gamma_ml must lie strictly inside (0,1)");
  return TemperingFunction(GTGS{theta, lambda, gamma_ml}, theta);
}

TemperingFunction TemperingFunction::bernstein(BernsteinMeasure measure) {
  if (measure.representation() == BernsteinMeasure::Representation::implicit)
    throw InvalidTempering("bernstein tempering needs an explicit measure");
  const double gamma = measure.gamma();
  return TemperingFunction(Bernstein{std::move(measure)}, gamma);
}

double TemperingFunction::log_tilted_unchecked(double x) const {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          return 0.0;
        } else if constexpr (std::is_same_v<K, KR>) {
          // q = (alpha+p) (x/r)^{alpha+p} Gamma(-alpha-p, x/r) = -s e^{-x/r} R(s, x/r)
          const double s = -(k.alpha + k.p);
          const auto scaled = scaled_upper_gamma(s, x / k.r, kEvalTol);
          return std::log(-s) + std::log(scaled.value);
        } else if constexpr (std::is_same_v<K, GTGS>) {
          const double y = k.lambda * std::pow(x, k.gamma_ml);
          return std::log(mittag_leffler(k.gamma_ml, -y, kEvalTol).value);
        } else {
          return k.measure.log_laplace_tilted(x);
        }
      },
      params_);
}

double TemperingFunction::log_tilted(double x) const {
  require_positive_x(x, "tempering log_tilted");
  return log_tilted_unchecked(x);
}

double TemperingFunction::log_eval(double x) const {
  require_positive_x(x, "tempering log_eval");
  return log_tilted_unchecked(x) - gamma_ * x;
}

double TemperingFunction::eval(double x) const {
  require_positive_x(x, "tempering eval");
  if (const auto* b = std::get_if<Bernstein>(&params_)) return b->measure.laplace(x);
  if (const auto* e = std::get_if<Exponential>(&params_)) return std::exp(-e->theta * x);
  return std::exp(log_tilted_unchecked(x) - gamma_ * x);
}

std::string TemperingFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Exponential>) {
          os << "exponential(theta=" << k.theta << ")";
        } else if constexpr (std::is_same_v<K, KR>) {
          os << "kr(alpha=" << k.alpha << ", p=" << k.p << ", r=" << k.r << ")";
        } else if constexpr (std::is_same_v<K, GTGS>) {
          os << "gtgs(theta=" << k.theta << ", lambda=" << k.lambda
             << ", gamma_ml=" << k.gamma_ml << ")";
        } else {
          const auto& m = k.measure;
          if (m.representation() == BernsteinMeasure::Representation::atoms) {
            os << "bernstein(atoms=[";
            for (std::size_t i = 0; i < m.atoms().size(); ++i)
              os << (i ? ", " : "") << "(" << m.atoms()[i].location << ", " << m.atoms()[i].mass << ")";
            os << "])";
          } else {
            os << "bernstein(density, gamma=" << m.gamma() << ")";
          }
        }
      },
      params_);
  return os.str();
}

bool TemperingFunction::operator==(const TemperingFunction& other) const {
  if (params_.index() != other.params_.index() || gamma_ != other.gamma_) return false;
  return std::visit(
      [&](const auto& k) -> bool {
        using K = std::decay_t<decltype(k)>;
        const auto& o = std::get<K>(other.params_);
        if constexpr (std::is_same_v<K, Exponential>) {
          return k.theta == o.theta;
        } else if constexpr (std::is_same_v<K, KR>) {
          return k.alpha == o.alpha && k.p == o.p && k.r == o.r;
        } else if constexpr (std::is_same_v<K, GTGS>) {
          return k.theta == o.theta && k.lambda == o.lambda && k.gamma_ml == o.gamma_ml;
        } else {
          const auto& a = k.measure;
          const auto& b = o.measure;
          if (a.representation() != b.representation() || a.total_mass() != b.total_mass())
            return false;
          if (a.atoms().size() != b.atoms().size()) return false;
          for (std::size_t i = 0; i < a.atoms().size(); ++i)
            if (a.atoms()[i].location != b.atoms()[i].location ||
                a.atoms()[i].mass != b.atoms()[i].mass)
              return false;
          return true;
        }
      },
      params_);
}

// ---------------------------------------------------------------------------
// Ratios and screens

double log_class_l_ratio(const TemperingFunction& q, double x, double y) {
  require_positive_x(x, "class_l_ratio");
  if (!(y >= 0.0)) throw DomainError("class_l_ratio: y must be >= 0");
  if (y == 0.0) return 0.0;
  const double lx = q.log_tilted(x);
  const double lxy = q.log_tilted(x + y);
  if (!std::isfinite(lx)) throw RangeError("class_l_ratio: q(x) underflows even in log form");
  return lxy - lx - q.tail_index() * y;
}

double class_l_ratio(const TemperingFunction& q, double x, double y) {
  return std::exp(log_class_l_ratio(q, x, y));
}

namespace {

MonotoneRatioReport scan_monotone(std::vector<double> ratios) {
  MonotoneRatioReport rep;
  // relative slack: ratios of fast-decaying q can be far below 1e-12;
  // ratios that are not finite (q underflowed) are skipped
  std::optional<double> prev;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!std::isfinite(ratios[i])) continue;
    if (prev && ratios[i] < *prev - kMonotoneSlack * std::abs(*prev)) {
      rep.monotone = false;
      rep.first_violation = i;
      break;
    }
    prev = ratios[i];
  }
  rep.ratios = std::move(ratios);
  return rep;
}

void require_ascending(std::span<const double> xs) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) throw DomainError("grid points must be > 0");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw DomainError("grid must be strictly ascending");
  }
}

}  // namespace

MonotoneRatioReport check_monotone_ratio(const TemperingFunction& q, double y,
                                         std::span<const double> xs) {
  require_ascending(xs);
  std::vector<double> r;
  r.reserve(xs.size());
  for (double x : xs) r.push_back(class_l_ratio(q, x, y));
  return scan_monotone(std::move(r));
}

MonotoneRatioReport check_monotone_ratio(const std::function<double(double)>& q, double y,
                                         std::span<const double> xs) {
  require_ascending(xs);
  std::vector<double> r;
  r.reserve(xs.size());
  for (double x : xs) r.push_back(q(x + y) / q(x));
  return scan_monotone(std::move(r));
}

CompleteMonotonicityReport check_complete_monotonicity(const std::function<double(double)>& q,
                                                       std::span<const double> xs,
                                                       int max_order, double step) {
  if (max_order < 1 || max_order > 8)
    throw DomainError("check_complete_monotonicity: max_order must lie in [1, 8]");
  if (xs.empty()) throw DomainError("check_complete_monotonicity: empty grid");
  double h = step;
  if (h <= 0.0) {
    h = kInf;
    for (std::size_t i = 1; i < xs.size(); ++i) h = std::min(h, xs[i] - xs[i - 1]);
    if (!std::isfinite(h)) h = 0.01 * xs[0];
  }
  CompleteMonotonicityReport rep;
  rep.step = h;
  rep.worst_margin.assign(max_order, kInf);
  rep.order_passed.assign(max_order, true);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<double> diff(max_order + 1);
  for (double x : xs) {
    if (!(x > 0.0)) throw DomainError("check_complete_monotonicity: grid points must be > 0");
    double scale = 0.0;
    for (int k = 0; k <= max_order; ++k) {
      diff[k] = q(x + k * h);
      scale = std::max(scale, std::abs(diff[k]));
    }
    for (int n = 1; n <= max_order; ++n) {
      for (int k = 0; k + n <= max_order; ++k) diff[k] = diff[k + 1] - diff[k];
      const double signed_diff = ((n % 2 == 0) ? 1.0 : -1.0) * diff[0];
      const double hn = std::pow(h, n);
      const double noise = 64.0 * eps * std::ldexp(scale, n);
      rep.worst_margin[n - 1] = std::min(rep.worst_margin[n - 1], signed_diff / hn);
      if (signed_diff < -noise) rep.order_passed[n - 1] = false;
    }
  }
  for (int n = 1; n <= max_order; ++n) {
    if (!rep.order_passed[n - 1]) {
      rep.passed = false;
      if (!rep.first_failed_order) rep.first_failed_order = n;
    }
  }
  return rep;
}

CompleteMonotonicityReport check_complete_monotonicity(const TemperingFunction& q,
                                                       std::span<const double> xs,
                                                       int max_order, double step) {
  return check_complete_monotonicity([&q](double x) { return q.eval(x); }, xs, max_order, step);
}

ProperCheck check_proper(const std::function<double(double)>& q) {
  // Aitken delta-squared on a geometric sequence of epsilons. The first
  // triple is the reference one; smaller triples are tried when q
  // approaches 1 like a small power of eps.
  constexpr std::array<std::array<double, 3>, 3> triples = {{
      {1e-2, 1e-3, 1e-4}, {1e-4, 1e-6, 1e-8}, {1e-8, 1e-10, 1e-12}}};
  ProperCheck best{};
  double best_gap = kInf;
  for (const auto& t : triples) {
    const double q1 = q(t[0]), q2 = q(t[1]), q3 = q(t[2]);
    double limit = q3;
    const double denom = q3 - 2.0 * q2 + q1;
    if (std::abs(denom) > 1e-15) limit = q3 - (q3 - q2) * (q3 - q2) / denom;
    const double gap = std::abs(limit - 1.0);
    if (gap < best_gap) {
      best_gap = gap;
      best.extrapolated = limit;
    }
    if (gap <= kProperTolerance) {
      best.passed = true;
      return best;
    }
  }
  return best;
}

void validate_tempering_candidate(const std::function<double(double)>& q) {
  const auto proper = check_proper(q);
  if (!proper.passed) {
    std::ostringstream os;
    os << "candidate tempering is not proper: q(0+) extrapolates to " << proper.extrapolated;
    throw InvalidTempering(os.str());
  }
  std::vector<double> xs;
  for (int i = 1; i <= 100; ++i) xs.push_back(0.05 * i);
  const auto cm = check_complete_monotonicity(q, xs, 4, 0.05);
  if (!cm.passed) {
    std::ostringstream os;
    os << "candidate tempering is not completely monotone: finite difference of order "
       << *cm.first_failed_order << " has the wrong sign";
    throw InvalidTempering(os.str());
  }
}

double tilt_limit(const TemperingFunction& q) {
  const double l10 = q.log_tilted(1e10);
  const double l12 = q.log_tilted(1e12);
  if (!std::isfinite(l12) || l12 - l10 < -1.0) return 0.0;
  return std::exp(l12);
}

double tilted_moment(const TemperingFunction& q, double s) {
  if (s == 0.0) return 1.0;
  const double gamma = q.tail_index();
  // integrand e^{s x} q(x) = exp((s - gamma) x + log_tilted(x)): decay check
  constexpr double X = 1e6;
  const double lX = q.log_tilted(X), l2X = q.log_tilted(2.0 * X);
  const double rate = (s - gamma) + (l2X - lX) / X;
  if (rate > 0.0) return kInf;
  if (std::abs(s - gamma) <= 1e-12 * std::max(1.0, gamma)) {
    // power-law decay x^{-p}; integrable iff p > 1
    const double p = -(l2X - lX) / std::log(2.0);
    if (!(p > 1.0 + 1e-6)) return kInf;
  }
  auto f = [&](double x) {
    if (x <= 0.0) return 1.0;
    return std::exp((s - gamma) * x + q.log_tilted(x));
  };
  quad::Options opt;
  opt.rel_tol = 1e-12;
  const double decay = std::max(gamma - s, 1e-3);
  auto r = quad::integrate_doubling(f, 0.0, std::min(1.0, 1.0 / decay), opt, 120);
  if (!r.converged) return kInf;
  return 1.0 + s * r.value;
}

}  // namespace tsa
