#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "tsa/error.hpp"

namespace tsa {

/// Piecewise Chebyshev interpolant on uniform panels of [lo, hi].
/// T is double or std::complex<double>.
template <class T>
class ChebyshevTable {
 public:
  ChebyshevTable() = default;

  template <class F>
  ChebyshevTable(F&& f, double lo, double hi, int panels, int degree)
      : lo_(lo), hi_(hi), panels_(panels), degree_(degree),
        width_((hi - lo) / panels), coeffs_(static_cast<std::size_t>(panels) * (degree + 1)) {
    if (!(hi > lo) || panels < 1 || degree < 1)
      throw DomainError("ChebyshevTable: invalid layout");
    const int n = degree + 1;
    std::vector<T> values(n);
    for (int p = 0; p < panels; ++p) {
      const double a = lo + p * width_;
      for (int j = 0; j < n; ++j) {
        const double node = std::cos(std::numbers::pi * (j + 0.5) / n);
        values[j] = f(a + 0.5 * width_ * (node + 1.0));
      }
      for (int k = 0; k < n; ++k) {
        T c{};
        for (int j = 0; j < n; ++j)
          c += values[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
        c *= 2.0 / n;
        coeffs_[static_cast<std::size_t>(p) * n + k] = c;
      }
    }
  }

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  bool empty() const noexcept { return coeffs_.empty(); }
  bool contains(double t) const noexcept { return t >= lo_ && t <= hi_; }

  T operator()(double t) const {
    int p = static_cast<int>((t - lo_) / width_);
    if (p < 0) p = 0;
    if (p >= panels_) p = panels_ - 1;
    const double a = lo_ + p * width_;
    const double y = 2.0 * (t - a) / width_ - 1.0;
    const T* c = coeffs_.data() + static_cast<std::size_t>(p) * (degree_ + 1);
    // Clenshaw
    T b1{}, b2{};
    for (int k = degree_; k >= 1; --k) {
      const T b0 = c[k] + 2.0 * y * b1 - b2;
      b2 = b1;
      b1 = b0;
    }
    return 0.5 * c[0] + y * b1 - b2;
  }

  /// Magnitude of the highest coefficient over all panels; a cheap
  /// indicator of interpolation accuracy.
  double tail_coefficient() const {
    double worst = 0.0;
    for (int p = 0; p < panels_; ++p)
      worst = std::max(worst, std::abs(coeffs_[static_cast<std::size_t>(p) * (degree_ + 1) + degree_]));
    return worst;
  }

 private:
  double lo_ = 0.0, hi_ = 0.0;
  int panels_ = 0, degree_ = 0;
  double width_ = 0.0;
  std::vector<T> coeffs_;
};

}  // namespace tsa
