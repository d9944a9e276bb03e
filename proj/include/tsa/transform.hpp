#pragma once

// Fourier inversion of exp(n kappa(w)) along the vertical line Re w = s.
//
// With M(w) = exp(kappa(w)) the density and survival function of the n-fold
// convolution are
//   p(x)    = e^{-s x} M(s)^n (1/pi) int_0^inf Re(e^{-iux} E(u)) du
//   F̄(x)   = e^{-s x} M(s)^n (1/pi) int_0^inf Re(e^{-iux} E(u)/(s+iu)) du,  s > 0
// with E(u) = exp(n (kappa(s+iu) - kappa(s))). Shifting the contour to the
// edge of the m.g.f. domain keeps deep-tail values representable: only the
// tilted density, not p itself, has to come out of the cancelling sum.
// At s = 0 the survival function uses the Gil-Pelaez form.

#include <complex>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "tsa/chebyshev.hpp"
#include "tsa/levy.hpp"

namespace tsa {

/// kappa(s + iu) - kappa(s) tabulated in t = log u on [log u_lo, log u_hi].
/// Below u_lo the difference is taken as 0; beyond u_hi, |exp(difference)|
/// is below exp(-kDecayTarget).
struct TiltTable {
  static constexpr double kULo = 1e-30;
  static constexpr double kDecayTarget = 45.0;

  double s = 0.0;
  double kappa_s = 0.0;
  double u_hi = 0.0;
  double table_error = 0.0;
  /// Real part of the difference at u_hi (<= -kDecayTarget unless capped).
  double decay_at_u_hi = 0.0;
  ChebyshevTable<std::complex<double>> delta;

  std::complex<double> operator()(double u) const;
};

namespace detail {

class TransformCache {
 public:
  /// Table for tilt s, built on first use. Thread-safe.
  std::shared_ptr<const TiltTable> table(const TSAlphaSpec& spec, double s);

 private:
  std::mutex mutex_;
  std::vector<std::shared_ptr<const TiltTable>> tables_;
};

}  // namespace detail

struct InversionResult {
  double value = 0.0;      // raw value; may be slightly negative from ringing
  double log_value = 0.0;  // log(value), -inf when value <= 0
  double abs_error = 0.0;  // estimated absolute error of value
  double rel_error = 0.0;  // abs_error / |value|
  double tilt = 0.0;
  bool converged = false;
};

enum class InversionTarget { pdf, sf };

/// Pointwise inversion for the n-fold convolution of a spec (n = 1 or 2).
class Inverter {
 public:
  explicit Inverter(TSAlphaSpec spec, int n_fold = 1);

  /// Tilt used for a given x: the upper m.g.f. edge right of the centre,
  /// the lower edge left of it, 0 when the relevant edge is 0 or absent.
  double tilt_for(double x) const;
  /// Approximate centre of the law (mean when finite, else drift).
  double centre() const noexcept { return centre_; }

  std::vector<InversionResult> evaluate(InversionTarget target, std::span<const double> xs,
                                        double tol) const;

  /// Inversion at a fixed tilt (pdf for any s; sf needs s > 0, s < 0 or the
  /// Gil-Pelaez form at s = 0).
  std::vector<InversionResult> evaluate_at_tilt(InversionTarget target, double s,
                                                std::span<const double> xs, double tol) const;

  const TSAlphaSpec& spec() const noexcept { return spec_; }
  int n_fold() const noexcept { return n_; }

 private:
  TSAlphaSpec spec_;
  int n_;
  double centre_ = 0.0;
};

}  // namespace tsa
