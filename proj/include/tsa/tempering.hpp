#pragma once

// Completely monotone tempering functions q(x) = int e^{-s x} Q(ds) and the
// ratio machinery that goes with them.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tsa {

/// Rejected tempering candidate (not proper, not completely monotone, bad
/// parameters).
class InvalidTempering : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Atom {
  double location;  // s >= 0
  double mass;      // w > 0
};

/// Positive measure on [0, inf) whose Laplace transform is a tempering
/// function. `gamma()` is the infimum of the support.
class BernsteinMeasure {
 public:
  enum class Representation { atoms, density, implicit };

  static BernsteinMeasure from_atoms(std::vector<Atom> atoms);
  /// `rho` is a density on [gamma, inf); its total mass is computed.
  static BernsteinMeasure from_density(std::function<double(double)> rho, double gamma);
  /// Placeholder for the closed-form kinds: only gamma is known.
  static BernsteinMeasure implicit(double gamma, double total_mass = 1.0);

  Representation representation() const noexcept { return rep_; }
  double gamma() const noexcept { return gamma_; }
  double total_mass() const noexcept { return total_mass_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  /// Laplace transform at x >= 0. Not available for the implicit form.
  double laplace(double x) const;
  /// log(e^{gamma x} * laplace(x)).
  double log_laplace_tilted(double x) const;

 private:
  double tilted_density_transform(double x) const;

  Representation rep_ = Representation::implicit;
  double gamma_ = 0.0;
  double total_mass_ = 1.0;
  std::vector<Atom> atoms_;
  std::function<double(double)> density_;
};

/// Tempering function q: (0, inf) -> (0, 1], completely monotone, q(0+) = 1.
/// Immutable after construction; every constructor validates properness.
class TemperingFunction {
 public:
  struct Exponential {
    double theta;
  };
  struct KR {
    double alpha;
    double p;
    double r;
  };
  struct GTGS {
    double theta;
    double lambda;
    double gamma_ml;
  };
  struct Bernstein {
    BernsteinMeasure measure;
  };
  enum class Kind { exponential, kr, gtgs, bernstein };

  static TemperingFunction exponential(double theta);
  static TemperingFunction kr(double alpha, double p, double r);
  static TemperingFunction gtgs(double theta, double lambda, double gamma_ml);
  static TemperingFunction bernstein(BernsteinMeasure measure);

  Kind kind() const noexcept { return static_cast<Kind>(params_.index()); }
  const auto& params() const noexcept { return params_; }

  /// Tail index gamma = inf supp Q.
  double tail_index() const noexcept { return gamma_; }

  double eval(double x) const;
  double log_eval(double x) const;
  /// log(e^{gamma x} q(x)); finite well beyond the range where q underflows.
  double log_tilted(double x) const;

  std::string describe() const;

  bool operator==(const TemperingFunction& other) const;

 private:
  using Params = std::variant<Exponential, KR, GTGS, Bernstein>;
  TemperingFunction(Params params, double gamma);
  double log_tilted_unchecked(double x) const;

  Params params_;
  double gamma_ = 0.0;
};

/// q(x+y)/q(x), computed from log q. Throws RangeError when q(x) is not
/// representable even in log form.
double class_l_ratio(const TemperingFunction& q, double x, double y);
double log_class_l_ratio(const TemperingFunction& q, double x, double y);

struct MonotoneRatioReport {
  bool monotone = true;
  std::optional<std::size_t> first_violation;  // r[i] < (1 - slack) r[prev]; non-finite r skipped
  std::vector<double> ratios;
};

inline constexpr double kMonotoneSlack = 1e-12;

/// Is x -> q(x+y)/q(x) non-decreasing along xs?
MonotoneRatioReport check_monotone_ratio(const TemperingFunction& q, double y,
                                         std::span<const double> xs);
MonotoneRatioReport check_monotone_ratio(const std::function<double(double)>& q, double y,
                                         std::span<const double> xs);

struct CompleteMonotonicityReport {
  bool passed = true;
  double step = 0.0;
  /// worst_margin[n-1] = min over x of (-1)^n Delta_h^n q(x) / h^n
  std::vector<double> worst_margin;
  std::vector<bool> order_passed;
  std::optional<int> first_failed_order;
};

/// Finite-difference screen of (-1)^n q^{(n)} >= 0 for n = 1..max_order
/// (max_order <= 8). A necessary condition only.
CompleteMonotonicityReport check_complete_monotonicity(const std::function<double(double)>& q,
                                                       std::span<const double> xs,
                                                       int max_order, double step = 0.0);
CompleteMonotonicityReport check_complete_monotonicity(const TemperingFunction& q,
                                                       std::span<const double> xs,
                                                       int max_order, double step = 0.0);

struct ProperCheck {
  double extrapolated = 0.0;
  bool passed = false;
};

inline constexpr double kProperTolerance = 1e-4;

/// Extrapolate q(0+) from q(1e-2), q(1e-3), q(1e-4).
ProperCheck check_proper(const std::function<double(double)>& q);

/// Screens a raw survival function for use as a tempering function:
/// throws InvalidTempering when it is not proper or fails the
/// complete-monotonicity screen.
void validate_tempering_candidate(const std::function<double(double)>& q);

/// m.g.f. of the law on [0, inf) with survival function q:
/// 1 + s int_0^inf e^{s x} q(x) dx, or +infinity when the integral diverges.
double tilted_moment(const TemperingFunction& q, double s);

/// lim_{z -> inf} e^{gamma z} q(z) with gamma the tail index.
double tilt_limit(const TemperingFunction& q);

}  // namespace tsa
