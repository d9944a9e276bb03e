#pragma once

// Adaptive Gauss-Kronrod quadrature and an oscillatory Fourier-tail
// integrator (cycle summation with Wynn epsilon acceleration).
//
// Header-only templates: the integrands used by the library are small
// lambdas and inlining them matters for the cumulant tables.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <type_traits>
#include <utility>
#include <vector>

namespace tsa::quad {

struct Options {
  double abs_tol = 0.0;
  double rel_tol = 1e-12;
  int max_subdivisions = 4000;
};

template <class T>
struct Result {
  T value{};
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Segment {
  double a, b;
  T value;
  double error;
  double resabs;
};

// 21-point Kronrod rule with the embedded 10-point Gauss rule. Error estimate
// follows the QUADPACK scaling.
template <class F, class T = std::invoke_result_t<F&, double>>
Segment<T> kronrod21(F& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const T fc = f(centre);
  T resk = fc * kWgk[10];
  T resg{};
  double resabs = magnitude(fc) * kWgk[10];
  std::array<T, 10> f1{}, f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = f(centre - dx);
    f2[j] = f(centre + dx);
    const T sum = f1[j] + f2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (magnitude(f1[j]) + magnitude(f2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const T reskh = resk * 0.5;
  double resasc = kWgk[10] * magnitude(fc - reskh);
  for (int j = 0; j < 10; ++j)
    resasc += kWgk[j] * (magnitude(f1[j] - reskh) + magnitude(f2[j] - reskh));

  const double h = std::abs(half);
  resasc *= h;
  resabs *= h;
  double err = magnitude((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
  return {a, b, resk * half, err, resabs};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (21 point) integration over [a, b].
/// Works for real and complex valued integrands.
template <class F, class T = std::invoke_result_t<F&, double>>
Result<T> integrate(F&& f, double a, double b, const Options& opt = {}) {
  using Seg = detail::Segment<T>;
  Result<T> out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  auto cmp = [](const Seg& l, const Seg& r) { return l.error < r.error; };
  std::vector<Seg> heap;
  heap.reserve(64);
  heap.push_back(detail::kronrod21(f, a, b));
  out.evaluations = 21;
  T total = heap.front().value;
  double err = heap.front().error;
  double resabs = heap.front().resabs;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  auto tolerance = [&] {
    return std::max({opt.abs_tol, opt.rel_tol * detail::magnitude(total),
                     100.0 * eps * resabs});
  };

  int iterations = 0;
  while (err > tolerance() && iterations < opt.max_subdivisions) {
    std::pop_heap(heap.begin(), heap.end(), cmp);
    Seg worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      // interval can no longer be split in floating point
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), cmp);
      break;
    }
    Seg left = detail::kronrod21(f, worst.a, mid);
    Seg right = detail::kronrod21(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    resabs += left.resabs + right.resabs - worst.resabs;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), cmp);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), cmp);
    ++iterations;
  }
  // recompute sums to shed accumulated cancellation from the updates
  total = T{};
  err = 0.0;
  for (const auto& s : heap) {
    total += s.value;
    err += s.error;
  }
  out.value = total;
  out.abs_error = err;
  out.converged = err <= tolerance();
  return out;
}

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// best estimate and a crude error (difference of the last two estimates).
template <class T>
std::pair<T, double> wynn_epsilon(const std::vector<T>& sums) {
  const std::size_t n = sums.size();
  if (n < 3) return {sums.back(), std::numeric_limits<double>::infinity()};
  std::vector<T> prev(n + 1, T{}), cur(sums.begin(), sums.end());
  // prev holds epsilon_{-1} = 0, cur holds epsilon_0 = S_k
  std::vector<T> estimates;
  estimates.push_back(sums.back());
  std::vector<T> even_last;
  for (std::size_t col = 1; col < n; ++col) {
    std::vector<T> next(n - col);
    bool broken = false;
    for (std::size_t k = 0; k + col < n; ++k) {
      const T diff = cur[k + 1] - cur[k];
      if (detail::magnitude(diff) == 0.0) {
        broken = true;
        break;
      }
      next[k] = prev[k + 1] + T(1.0) / diff;
    }
    if (broken) break;
    prev = std::move(cur);
    cur = std::move(next);
    if (col % 2 == 0) estimates.push_back(cur.back());
  }
  const T best = estimates.back();
  double e = std::numeric_limits<double>::infinity();
  if (estimates.size() >= 2)
    e = detail::magnitude(estimates[estimates.size() - 1] -
                          estimates[estimates.size() - 2]);
  return {best, e};
}

/// Integral of g(x) e^{i omega x} over [a, inf) for a slowly varying or
/// decaying real g. Half-period cycles are integrated adaptively and the
/// partial sums are accelerated with the epsilon algorithm.
template <class F>
Result<std::complex<double>> fourier_tail(F&& g, double omega, double a,
                                          const Options& opt = {},
                                          int max_cycles = 400) {
  using C = std::complex<double>;
  Result<C> out;
  const double period = std::numbers::pi / std::abs(omega);
  auto integrand = [&](double x) { return g(x) * std::polar(1.0, omega * x); };

  std::vector<C> partial;
  C sum{};
  double err_sum = 0.0;
  C last_estimate{};
  int stable = 0;
  Options cycle_opt = opt;
  cycle_opt.rel_tol = std::max(opt.rel_tol * 0.1, 1e-15);
  for (int k = 0; k < max_cycles; ++k) {
    const double lo = a + k * period;
    const double hi = lo + period;
    auto r = integrate(integrand, lo, hi, cycle_opt);
    out.evaluations += r.evaluations;
    sum += r.value;
    err_sum += r.abs_error;
    partial.push_back(sum);
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(sum));
    if (std::abs(r.value) < 0.01 * tol && k >= 2) {
      out.value = sum;
      out.abs_error = err_sum + std::abs(r.value);
      out.converged = true;
      return out;
    }
    if (partial.size() >= 4) {
      // limit table depth so old cycles dominated by roundoff do not stall it
      const std::size_t depth = std::min<std::size_t>(partial.size(), 40);
      std::vector<C> window(partial.end() - static_cast<long>(depth), partial.end());
      auto [est, est_err] = wynn_epsilon(window);
      const double change = std::abs(est - last_estimate);
      last_estimate = est;
      if (std::max(change, est_err) < tol) {
        if (++stable >= 2) {
          out.value = est;
          out.abs_error = std::max(change, est_err) + err_sum;
          out.converged = true;
          return out;
        }
      } else {
        stable = 0;
      }
    }
  }
  out.value = last_estimate;
  out.abs_error = std::abs(last_estimate - sum) + err_sum;
  out.converged = false;
  return out;
}

/// Integral over [a, inf) of an integrand with (at least) exponential decay:
/// panels of doubling width starting at `width0`, stopped once two
/// consecutive panels contribute below the tolerance.
template <class F, class T = std::invoke_result_t<F&, double>>
Result<T> integrate_doubling(F&& f, double a, double width0, const Options& opt = {},
                             int max_panels = 80) {
  Result<T> out;
  double lo = a, width = width0;
  int quiet = 0;
  for (int k = 0; k < max_panels; ++k) {
    auto r = integrate(f, lo, lo + width, opt);
    out.value += r.value;
    out.abs_error += r.abs_error;
    out.evaluations += r.evaluations;
    const double tol = std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(out.value));
    if (detail::magnitude(r.value) <= 0.01 * tol) {
      if (++quiet >= 2) {
        out.converged = true;
        return out;
      }
    } else {
      quiet = 0;
    }
    lo += width;
    width *= 2.0;
  }
  out.converged = false;
  return out;
}

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  explicit GaussLegendre(int n);
};

inline GaussLegendre::GaussLegendre(int n) : nodes(n), weights(n) {
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

}  // namespace tsa::quad
