#include <doctest.h>

#include <cmath>
#include <vector>

#include "tsa/error.hpp"
#include "tsa/tabulated.hpp"
#include "tsa/tempering.hpp"

using namespace tsa;

namespace {

double rel(double a, double b) { return std::abs(a / b - 1.0); }

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
  return g;
}

const TemperingFunction kExp = TemperingFunction::exponential(1.0);
const TemperingFunction kKr = TemperingFunction::kr(0.5, 0.3, 2.0);
const TemperingFunction kGtgs = TemperingFunction::gtgs(0.4, 1.0, 0.5);

}  // namespace

TEST_CASE("closed forms") {
  CHECK(rel(kExp.eval(3.0), std::exp(-3.0)) < 1e-15);
  // theta = 0, gamma_ml = 1/2: q(x) = e^x erfc(sqrt x)
  const auto g0 = TemperingFunction::gtgs(0.0, 1.0, 0.5);
  CHECK(rel(g0.eval(4.0), 0.2553956763105057) < 1e-12);
  CHECK(rel(g0.eval(2.0), 0.33620400244634121285) < 1e-12);
  CHECK(rel(TemperingFunction::kr(0.6, 0.3, 2.0).eval(2.0), 0.13834377088259628332) < 1e-12);
  CHECK(rel(kGtgs.eval(2.0), std::exp(-0.8) * 0.33620400244634121285) < 1e-12);
}

TEST_CASE("q(0+) = 1 and q decreases") {
  for (const auto* q : {&kExp, &kKr, &kGtgs}) {
    CAPTURE(q->describe());
    CHECK(std::abs(q->eval(1e-9) - 1.0) < 1e-3);
    double prev = 1.0;
    for (double x : log_grid(1e-3, 300.0, 60)) {
      const double v = q->eval(x);
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("tail indices") {
  CHECK(kExp.tail_index() == 1.0);
  CHECK(kKr.tail_index() == 0.5);
  CHECK(kGtgs.tail_index() == 0.4);
  CHECK(TemperingFunction::gtgs(0.0, 2.0, 0.7).tail_index() == 0.0);
}

TEST_CASE("log forms survive underflow") {
  CHECK(kExp.eval(1000.0) == 0.0);
  CHECK(kExp.log_eval(1000.0) == doctest::Approx(-1000.0).epsilon(1e-15));
  CHECK(std::isfinite(kKr.log_eval(5000.0)));
  CHECK(std::isfinite(kGtgs.log_tilted(1e6)));
  CHECK(kGtgs.log_eval(3.0) == doctest::Approx(std::log(kGtgs.eval(3.0))).epsilon(1e-13));
}

TEST_CASE("class L ratio tends to e^{-gamma y}") {
  CHECK(rel(class_l_ratio(kExp, 50.0, 1.0), std::exp(-1.0)) < 1e-14);
  CHECK(std::abs(class_l_ratio(kKr, 1e5, 1.0) - std::exp(-0.5)) < 1e-5);
  CHECK(std::abs(class_l_ratio(kGtgs, 1e5, 1.0) - std::exp(-0.4)) < 1e-5);
  CHECK(class_l_ratio(kKr, 3.0, 0.0) == 1.0);
}

TEST_CASE("monotone ratio holds for completely monotone kinds") {
  const auto xs = log_grid(0.1, 100.0, 200);
  for (const auto* q : {&kExp, &kKr, &kGtgs})
    for (double y : {0.5, 1.0, 5.0}) {
      CAPTURE(q->describe());
      CAPTURE(y);
      CHECK(check_monotone_ratio(*q, y, xs).monotone);
    }
}

TEST_CASE("weibull k = 2 fails the monotone ratio and the screens") {
  auto weibull = [](double x) { return std::exp(-x * x); };
  const auto xs = log_grid(0.1, 100.0, 200);
  const auto r = check_monotone_ratio(weibull, 1.0, xs);
  CHECK_FALSE(r.monotone);
  CHECK(r.first_violation.has_value());
  // ratios near e^{-26} and underflowing q must not hide the decrease
  CHECK_FALSE(check_monotone_ratio(weibull, 5.0, xs).monotone);
  CHECK_FALSE(check_monotone_ratio(weibull, 0.5, xs).monotone);
  const auto cm = check_complete_monotonicity(weibull, log_grid(0.05, 5.0, 100), 4);
  CHECK_FALSE(cm.passed);
  CHECK_THROWS_AS(validate_tempering_candidate(weibull), InvalidTempering);
}

TEST_CASE("complete monotonicity screen passes the kinds") {
  const auto xs = log_grid(0.05, 5.0, 100);
  for (const auto* q : {&kExp, &kKr, &kGtgs}) {
    CAPTURE(q->describe());
    CHECK(check_complete_monotonicity(*q, xs, 4).passed);
  }
  CHECK_NOTHROW(validate_tempering_candidate([](double x) { return std::exp(-x) / (1.0 + x); }));
}

TEST_CASE("properness") {
  CHECK(check_proper([](double x) { return std::exp(-2.0 * x); }).passed);
  const auto g0 = TemperingFunction::gtgs(0.0, 1.0, 0.5);
  const auto p = check_proper([&](double x) { return g0.eval(x); });
  CHECK(p.passed);
  CHECK(std::abs(p.extrapolated - 1.0) < 1e-4);
  CHECK_FALSE(check_proper([](double x) { return 0.5 * std::exp(-x); }).passed);
  CHECK_THROWS_AS(validate_tempering_candidate([](double x) { return 0.5 * std::exp(-x); }),
                  InvalidTempering);
}

TEST_CASE("bernstein measures") {
  const auto atoms = TemperingFunction::bernstein(
      BernsteinMeasure::from_atoms({{2.0, 0.25}, {0.5, 0.75}}));
  CHECK(atoms.tail_index() == 0.5);
  CHECK(rel(atoms.eval(1.5), 0.25 * std::exp(-3.0) + 0.75 * std::exp(-0.75)) < 1e-15);

  // rho(s) = e^{-(s-1)} on [1, inf) has transform e^{-x}/(1+x)
  const auto dens = TemperingFunction::bernstein(
      BernsteinMeasure::from_density([](double s) { return std::exp(-(s - 1.0)); }, 1.0));
  CHECK(dens.tail_index() == 1.0);
  CHECK(rel(dens.eval(2.0), std::exp(-2.0) / 3.0) < 1e-10);

  // q(0+) = 0.5: a valid measure but not a tempering function
  CHECK_THROWS_AS(TemperingFunction::bernstein(BernsteinMeasure::from_atoms({{1.0, 0.5}})),
                  InvalidTempering);
  CHECK_THROWS_AS(BernsteinMeasure::from_atoms({{-1.0, 1.0}}), InvalidTempering);
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(TemperingFunction::exponential(-1.0), InvalidTempering);
  CHECK_THROWS_AS(TemperingFunction::gtgs(0.4, 1.0, 1.5), InvalidTempering);
  CHECK_THROWS_AS(TemperingFunction::gtgs(0.4, -1.0, 0.5), InvalidTempering);
  CHECK_THROWS_AS(TemperingFunction::kr(0.5, 0.3, 0.0), InvalidTempering);
}

TEST_CASE("tilted moments") {
  CHECK(rel(tilted_moment(kExp, 0.5), 2.0) < 1e-12);
  CHECK(std::isinf(tilted_moment(kExp, 1.0)));
  CHECK(tilted_moment(kGtgs, 0.0) == 1.0);
  CHECK(rel(tilted_moment(kKr, 0.3), 1.459035599616691004) < 1e-9);
  CHECK(std::isinf(tilted_moment(kKr, 0.5)));
  CHECK(std::isinf(tilted_moment(kKr, 0.7)));
  CHECK(rel(tilt_limit(kExp), 1.0) < 1e-12);
}

TEST_CASE("tabulated log_tilted matches direct evaluation") {
  for (const auto* q : {&kKr, &kGtgs}) {
    const TabulatedTempering t(*q);
    CAPTURE(q->describe());
    CHECK(t.tabulated());
    CHECK(t.table_error() < 1e-12);
    for (double x : log_grid(3.3e-8, 7.7e7, 97))
      CHECK(std::abs(t.log_tilted(x) - q->log_tilted(x)) < 1e-11 * std::max(1.0, std::abs(q->log_tilted(x))));
    CHECK(t.log_tilted(1e10) == q->log_tilted(1e10));
  }
  CHECK_FALSE(TabulatedTempering(kExp).tabulated());
}
