#pragma once

#include "tsa/chebyshev.hpp"
#include "tsa/tempering.hpp"

namespace tsa {

/// A tempering function with log(e^{gamma x} q(x)) tabulated in log x on
/// [1e-8, 1e8]. Outside that range, or when the table fails its self check,
/// evaluation falls through to the exact function.
class TabulatedTempering {
 public:
  explicit TabulatedTempering(TemperingFunction q);

  const TemperingFunction& function() const noexcept { return q_; }
  double tail_index() const noexcept { return q_.tail_index(); }
  bool tabulated() const noexcept { return !table_.empty(); }

  double log_tilted(double x) const;
  double log_eval(double x) const { return log_tilted(x) - q_.tail_index() * x; }
  double eval(double x) const;

  /// Largest |table - exact| seen in the self check (0 when untabulated).
  double table_error() const noexcept { return table_error_; }

 private:
  TemperingFunction q_;
  ChebyshevTable<double> table_;
  double table_error_ = 0.0;
};

}  // namespace tsa
