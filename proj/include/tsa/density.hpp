#pragma once

// Density and survival function of a TSα law: an FFT grid for the bulk and
// pointwise tilted inversion for the tails.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tsa/levy.hpp"
#include "tsa/transform.hpp"

namespace tsa {

struct DensityGrid {
  double x0 = 0.0;
  double dx = 0.0;
  std::size_t n = 0;
  std::vector<double> pdf_values;  // raw, may ring slightly below 0
  std::vector<double> sf_values;   // right cumulative sums of pdf
  double aliasing_error_estimate = 0.0;
  double truncation_error_estimate = 0.0;

  double x(std::size_t j) const noexcept { return x0 + static_cast<double>(j) * dx; }
  double mass() const;
  double mean() const;
  /// x where the grid survival function is 1/2 (cubic Hermite within a cell).
  double median() const;
};

/// Grid on [a, a + n dx) with dx = (b - a)/n from a discrete transform of the
/// characteristic function. n must be a power of two >= 1024. Throws
/// ConvergenceError naming the n needed when the c.f. has not decayed below
/// `accuracy` at the grid's Nyquist frequency.
DensityGrid pdf_grid(const TSAlphaSpec& spec, double a, double b, std::size_t n,
                     double accuracy = 1e-8);

/// Interval outside which the Chernoff bound min_s e^{kappa(s) - s x} (or the
/// Lévy tail for a side without exponential moments) is below `level`.
std::pair<double, double> auto_domain(const TSAlphaSpec& spec, double level = 1e-8);

/// auto_domain plus the smallest power-of-two n at which the c.f. has decayed
/// below min(level, 1e-11), so negative ringing stays above -1e-10.
DensityGrid pdf_grid_auto(const TSAlphaSpec& spec, double level = 1e-8);

/// Pointwise inversion. Scalar forms throw ConvergenceError (carrying the
/// achieved relative error) when tol is not met; batch forms report instead.
double pdf_point(const TSAlphaSpec& spec, double x, double tol);
double sf_point(const TSAlphaSpec& spec, double x, double tol);
/// Upper tail of the two-fold self-convolution.
double convolution_sf(const TSAlphaSpec& spec, double x, double tol);

std::vector<InversionResult> pdf_points(const TSAlphaSpec& spec, std::span<const double> xs,
                                        double tol);
std::vector<InversionResult> sf_points(const TSAlphaSpec& spec, std::span<const double> xs,
                                       double tol);
std::vector<InversionResult> convolution_sf_points(const TSAlphaSpec& spec,
                                                   std::span<const double> xs, double tol);

}  // namespace tsa
