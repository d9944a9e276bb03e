#pragma once

// Scalar special functions used by the tempering kinds: the one-parameter
// Mittag-Leffler function on the negative axis and the upper incomplete
// gamma function for negative non-integer order.

#include <optional>
#include <string_view>

namespace tsa {

enum class Method { series, continued_fraction, asymptotic, quadrature };

std::string_view to_string(Method m);

struct EvalResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  Method method_used = Method::series;
};

inline constexpr double kDefaultTolerance = 1e-10;

/// E_g(z) = sum_k z^k / Gamma(g k + 1) for g in (0, 1] and z <= 0.
///
/// Small |z| uses the power series, large |z| the algebraic asymptotic
/// expansion, and the region in between the spectral integral
/// E_g(-t^g) = int_0^inf e^{-r t} K_g(r) dr. `tol` is relative.
/// Throws DomainError outside the domain and ConvergenceError when no
/// branch reaches `tol`.
EvalResult mittag_leffler(double g, double z, double tol = kDefaultTolerance);

/// Same, restricted to one branch. Never throws ConvergenceError; the
/// returned error estimate tells how well the branch did.
EvalResult mittag_leffler(double g, double z, Method forced, double tol = kDefaultTolerance);

/// Upper incomplete gamma Gamma(s, x) = int_x^inf e^{-t} t^{s-1} dt for
/// x > 0 and s not a non-positive integer. Negative orders go through the
/// downward recurrence from s + m in (0, 1]. Throws RangeError when the
/// result overflows.
EvalResult upper_incomplete_gamma(double s, double x, double tol = kDefaultTolerance);

/// e^{x} x^{-s} Gamma(s, x): the scale-free part of Gamma(s, x). Never
/// overflows for x > 0.
EvalResult scaled_upper_gamma(double s, double x, double tol = kDefaultTolerance);

/// log Gamma(s, x), valid where Gamma(s, x) itself would under/overflow.
double log_upper_incomplete_gamma(double s, double x, double tol = kDefaultTolerance);

/// Gamma*(s, x) = x^{-s} Gamma(s, x) / Gamma(s).
EvalResult gamma_star(double s, double x, double tol = kDefaultTolerance);

/// Gamma*(s, x) through its integral form (1/Gamma(s)) int_1^inf e^{-x t} t^{s-1} dt,
/// evaluated by adaptive quadrature. Used to cross-check gamma_star.
EvalResult gamma_star_integral(double s, double x, double tol = kDefaultTolerance);

/// 1/Gamma(x), exactly zero at the poles of Gamma.
double reciprocal_gamma(double x);

/// Gamma(1 + s) - 1 without cancellation for small |s|.
double tgamma1pm1(double s);

}  // namespace tsa
