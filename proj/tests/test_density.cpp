#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "tsa/density.hpp"
#include "tsa/error.hpp"

using namespace tsa;

namespace {

TSAlphaSpec exp_spec() { return TSAlphaSpec::one_sided(0.5, 1.0, TemperingFunction::exponential(1.0)); }

TSAlphaSpec symmetric_spec() {
  return TSAlphaSpec(0.7, 1.0, TemperingFunction::exponential(1.0), 1.0,
                     TemperingFunction::exponential(1.0));
}

// alpha = 1/2, q = e^{-x}: an exponentially tilted Lévy law,
// p(x) = y^{-3/2} exp(2 sqrt(pi) - y - pi/y) with y = x + sqrt(pi) erf(1).
double exact_pdf(double x) {
  const double pi = std::numbers::pi;
  const double y = x + std::sqrt(pi) * std::erf(1.0);
  if (y <= 0) return 0.0;
  return std::pow(y, -1.5) * std::exp(2 * std::sqrt(pi) - y - pi / y);
}

double exact_sf(double x) {
  const double lo = -std::sqrt(std::numbers::pi) * std::erf(1.0);
  boost::math::quadrature::exp_sinh<double> es;
  if (x > lo) return es.integrate([&](double t) { return exact_pdf(x + t); }, 0.0, INFINITY);
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(exact_pdf, lo, lo + 1.0) +
         es.integrate([&](double t) { return exact_pdf(lo + 1.0 + t); }, 0.0, INFINITY);
}

}  // namespace

TEST_CASE("pointwise inversion reproduces the tilted Lévy law") {
  const auto s = exp_spec();
  for (double x : {-0.5, 0.0, 0.7, 3.0, 12.0, 40.0}) {
    CAPTURE(x);
    const double p = pdf_point(s, x, 1e-9);
    CHECK(std::abs(p / exact_pdf(x) - 1) < 1e-8);
    const double f = sf_point(s, x, 1e-9);
    CHECK(std::abs(f / exact_sf(x) - 1) < 1e-8);
  }
}

TEST_CASE("grid agrees with the exact density") {
  const auto s = exp_spec();
  const auto g = pdf_grid_auto(s);
  CHECK(std::abs(g.mass() - 1.0) < 1e-7);
  // mean = kappa'(0) = Gamma(1/2, 1) = sqrt(pi) erfc(1)
  CHECK(std::abs(g.mean() - std::sqrt(std::numbers::pi) * std::erfc(1.0)) < 1e-6);
  double worst = 0;
  for (std::size_t j = 0; j < g.n; j += 97) worst = std::max(worst, std::abs(g.pdf_values[j] - exact_pdf(g.x(j))));
  CHECK(worst < 1e-7);
  const double m = g.median();
  CHECK(std::abs(exact_sf(m) - 0.5) < 1e-7);
  CHECK(std::abs(sf_point(s, m, 1e-9) - 0.5) < 1e-7);
}

TEST_CASE("survival values are non-increasing on the grid") {
  const auto g = pdf_grid_auto(exp_spec());
  for (std::size_t j = 1; j < g.n; ++j) REQUIRE(g.sf_values[j] <= g.sf_values[j - 1] + 1e-12);
  CHECK(g.sf_values.front() == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("symmetric law") {
  const auto s = symmetric_spec();
  const auto g = pdf_grid_auto(s);
  CHECK(std::abs(g.mean()) < 1e-7);
  CHECK(std::abs(g.median()) < 1e-6);
  for (double x : {0.3, 2.0, 9.0}) {
    CAPTURE(x);
    CHECK(pdf_point(s, x, 1e-9) == doctest::Approx(pdf_point(s, -x, 1e-9)).epsilon(1e-8));
  }
  CHECK(sf_point(s, 0.0, 1e-9) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("reflection swaps the tails") {
  const TSAlphaSpec s(0.6, 1.0, TemperingFunction::exponential(1.0), 0.4,
                      TemperingFunction::exponential(2.5), 0.2);
  const auto r = reflect(s);
  for (double x : {-3.0, -0.4, 0.0, 1.1, 5.0}) {
    CAPTURE(x);
    CHECK(std::abs(sf_point(s, x, 1e-9) + sf_point(r, -x, 1e-9) - 1.0) < 1e-8);
    CHECK(pdf_point(s, x, 1e-9) == doctest::Approx(pdf_point(r, -x, 1e-9)).epsilon(1e-8));
  }
}

TEST_CASE("grid and pointwise inversion agree on a two-sided law") {
  const TSAlphaSpec s(1.3, 1.0, TemperingFunction::exponential(1.0), 0.5,
                      TemperingFunction::kr(1.3, 0.5, 1.0));
  const auto g = pdf_grid_auto(s);
  CHECK(std::abs(g.mass() - 1.0) < 1e-7);
  for (std::size_t j = g.n / 4; j < 3 * g.n / 4; j += g.n / 16) {
    CAPTURE(g.x(j));
    CHECK(std::abs(g.pdf_values[j] - pdf_point(s, g.x(j), 1e-9)) < 1e-7);
  }
  const double m = g.median();
  CHECK(std::abs(sf_point(s, m, 1e-9) - 0.5) < 1e-7);
}

TEST_CASE("self-convolution tail") {
  const auto s = exp_spec();
  const auto g = pdf_grid_auto(s);
  // trapezoid convolution of the grid density with the pointwise tail
  for (double x : {1.0, 4.0}) {
    CAPTURE(x);
    double acc = 0;
    for (std::size_t j = 0; j < g.n; ++j) {
      const double p = g.pdf_values[j];
      if (p > 1e-14) acc += p * exact_sf(x - g.x(j)) * g.dx;
    }
    CHECK(std::abs(convolution_sf(s, x, 1e-9) - acc) < 1e-6);
  }
  // P(X1 + X2 > 2m) >= P(X1 > m)^2
  for (double m : {0.0, 1.0, 6.0, 30.0}) {
    CAPTURE(m);
    CHECK(convolution_sf(s, 2 * m, 1e-8) >= std::pow(sf_point(s, m, 1e-8), 2));
  }
  CHECK(convolution_sf(s, -50.0, 1e-9) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("batch forms report instead of throwing") {
  const auto s = exp_spec();
  const std::vector<double> xs{0.5, 2.0, 8.0};
  const auto p = pdf_points(s, xs, 1e-9);
  const auto f = sf_points(s, xs, 1e-9);
  const auto c = convolution_sf_points(s, xs, 1e-9);
  REQUIRE(p.size() == 3);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(p[i].converged);
    CHECK(p[i].value == doctest::Approx(exact_pdf(xs[i])).epsilon(1e-8));
    CHECK(f[i].value == doctest::Approx(exact_sf(xs[i])).epsilon(1e-8));
    CHECK(c[i].value == doctest::Approx(convolution_sf(s, xs[i], 1e-9)).epsilon(1e-12));
  }
}

TEST_CASE("argument checks") {
  const auto s = exp_spec();
  CHECK_THROWS_AS(pdf_grid(s, -5, 50, 1000), DomainError);
  CHECK_THROWS_AS(pdf_grid(s, 5, -5, 1024), DomainError);
  CHECK_THROWS_AS(pdf_point(s, 1.0, 1e-14), DomainError);
  try {
    pdf_grid(s, -5, 5000, 1024);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(std::string(e.what()).find("n >=") != std::string::npos);
  }
}

TEST_CASE("grid invariants hold for a slowly decaying characteristic function") {
  const auto s = TSAlphaSpec::one_sided(0.5, 1.0, TemperingFunction::gtgs(0.4, 1.0, 0.5));
  const auto g = pdf_grid_auto(s);
  for (double p : g.pdf_values) REQUIRE(p >= -1e-10);
  for (std::size_t j = 1; j < g.n; ++j) REQUIRE(g.sf_values[j] <= g.sf_values[j - 1] + 1e-10);
  CHECK(std::abs(g.mass() - 1.0) < 1e-4);
}
