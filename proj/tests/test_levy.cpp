#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <complex>

#include "tsa/error.hpp"
#include "tsa/levy.hpp"

using namespace tsa;
using C = std::complex<double>;

namespace {

double rel(double a, double b) { return std::abs(a / b - 1.0); }

TSAlphaSpec exp_spec() { return TSAlphaSpec::one_sided(0.5, 1.0, TemperingFunction::exponential(1.0)); }

TSAlphaSpec mixed_spec() {
  return TSAlphaSpec(0.6, 1.0, TemperingFunction::gtgs(0.0, 1.0, 0.5), 0.5,
                     TemperingFunction::kr(0.6, 0.3, 2.0));
}

// kappa for the one-sided exponential law with alpha = 1/2, theta = delta = 1
C exp_kappa_closed(C w) {
  const double a = 0.5;
  const double g = std::tgamma(-a);
  return g * (std::pow(1.0 - w, a) - 1.0 + a * w) + w * boost::math::tgamma(1.0 - a, 1.0);
}

}  // namespace

TEST_CASE("cumulant of the exponential law") {
  const auto s = exp_spec();
  CHECK(rel(cumulant(s, 1.0), 2.05125943618617800379740009442) < 1e-13);
  CHECK(rel(mgf(s, 1.0), 7.7776904452806072140704580425) < 1e-13);
  CHECK(cumulant(s, 0.0) == 0.0);
  CHECK(std::isinf(cumulant(s, 1.1)));
  for (double w : {-3.0, -0.4, 0.25, 0.9})
    CHECK(std::abs(cumulant(s, w) - exp_kappa_closed(w).real()) < 1e-13);
}

TEST_CASE("cumulant by an independent quadrature") {
  using namespace boost::math::quadrature;
  auto small = [](double x) { return std::expm1(x) - x == 0.0 ? 0.0 : (std::expm1(x) - x) * std::exp(-x) * std::pow(x, -1.5); };
  auto large = [](double x) { return -std::expm1(-x) * std::pow(x, -1.5); };
  tanh_sinh<double> ts;
  exp_sinh<double> es;
  const double k = ts.integrate(small, 0.0, 1.0) + es.integrate(large, 1.0, INFINITY);
  CHECK(std::abs(k - cumulant(exp_spec(), 1.0)) < 1e-10);
}

TEST_CASE("characteristic exponent matches the closed form") {
  const auto s = exp_spec();
  for (double u : {1e-25, 1e-12, 1e-3, 0.7, 3.0, 50.0, 1e3, 1e4}) {
    CAPTURE(u);
    const C got = characteristic_exponent(s, u);
    const C ref = exp_kappa_closed(C(0.0, u));
    CHECK(std::abs(got - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
  }
  for (double u : {1e-20, 0.5, 40.0}) {
    CAPTURE(u);
    const C got = complex_cumulant(s, C(1.0, u));
    const C ref = exp_kappa_closed(C(1.0, u));
    CHECK(std::abs(got - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("tails and nu1") {
  const auto s = exp_spec();
  CHECK(rel(levy_tail(s, 1.0), 0.178147711781560690192582318168) < 1e-13);
  const auto n = make_nu1(s);
  CHECK(rel(2.0 * nu1_mgf(n, 1.0), 22.4532774516053196879852164639) < 1e-12);
  // int_1^inf x^{-3/2} dx = 2 = delta/alpha
  CHECK(rel(nu1_mgf(n, 1.0), 1.0 / (0.5 * levy_tail(s, 1.0))) < 1e-12);
  CHECK(nu1_density(n, 0.5) == 0.0);
  CHECK(nu1_tail(n, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::isinf(nu1_mgf(n, 1.2)));
  CHECK(nu1_mgf(n, 0.0) == 1.0);

  boost::math::quadrature::exp_sinh<double> es;
  const double mass = es.integrate([&](double x) { return nu1_density(n, 1.0 + x); }, 0.0, INFINITY);
  CHECK(std::abs(mass - 1.0) < 1e-8);
}

TEST_CASE("log tail is finite where the tail underflows") {
  const auto s = exp_spec();
  CHECK(levy_tail(s, 2000.0) == 0.0);
  // nu([x, inf)) ~ x^{-3/2} e^{-x} for large x
  CHECK(std::abs(log_levy_tail(s, 2000.0) - (-2000.0 - 1.5 * std::log(2000.0))) < 1e-3);
}

TEST_CASE("mixed two-sided law") {
  const auto s = mixed_spec();
  const C p1 = characteristic_exponent(s, 0.7);
  CHECK(std::abs(p1 - C(-0.556063591513819, 0.181225354364388)) < 1e-13);
  const C p2 = characteristic_exponent(s, 50.0);
  CHECK(std::abs(p2 - C(-25.6620742086415, -27.7748893495624)) < 1e-11);
  CHECK(std::abs(cumulant(s, -0.3) - (-0.1460393166720716061)) < 1e-13);
  CHECK(s.mgf_upper() == 0.0);
  CHECK(s.mgf_lower() == -0.5);
}

TEST_CASE("one-sided pieces of the mixed law") {
  const auto g = TSAlphaSpec::one_sided(0.6, 1.0, TemperingFunction::gtgs(0.0, 1.0, 0.5));
  const auto k = TSAlphaSpec::one_sided(0.6, 1.0, TemperingFunction::kr(0.6, 0.3, 2.0));
  CHECK(rel(cumulant(g, -0.3), -0.21346395413020862804) < 1e-12);
  CHECK(rel(cumulant(k, 0.3), 0.13484927491627404387) < 1e-12);
  CHECK(rel(cumulant(k, -0.3), -0.047281129628884138017) < 1e-12);
  CHECK(rel(levy_tail(g, 1.0), 0.43493255410909071154) < 1e-12);
  CHECK(rel(levy_tail(k, 1.0), 0.1628859086371401509) < 1e-12);
}

TEST_CASE("reflection") {
  const auto s = mixed_spec();
  const auto r = reflect(s);
  CHECK(r.delta_plus() == 0.5);
  CHECK(r.delta_minus() == 1.0);
  CHECK(reflect(r) == s);
  CHECK(std::abs(cumulant(r, 0.3) - cumulant(s, -0.3)) < 1e-15);
  CHECK(levy_density(r, 2.0) == levy_density(s, -2.0));
  const auto b = TSAlphaSpec::one_sided(0.5, 1.0, TemperingFunction::exponential(1.0), 0.7);
  CHECK(reflect(b).drift_b() == -0.7);
}

TEST_CASE("levy density") {
  const auto s = mixed_spec();
  CHECK(rel(levy_density(s, 2.0), 0.33620400244634121285 * std::pow(2.0, -1.6)) < 1e-12);
  CHECK(rel(levy_density(s, -2.0), 0.5 * 0.13834377088259628332 * std::pow(2.0, -1.6)) < 1e-12);
  CHECK_THROWS_AS(levy_density(s, 0.0), DomainError);
}

TEST_CASE("drift shifts the cumulant linearly") {
  const auto a = exp_spec();
  const auto b = TSAlphaSpec::one_sided(0.5, 1.0, TemperingFunction::exponential(1.0), 0.3);
  CHECK(std::abs(cumulant(b, 0.8) - cumulant(a, 0.8) - 0.24) < 1e-14);
}

TEST_CASE("exponential moment verdicts") {
  const auto s = exp_spec();
  CHECK(side_exponential_moment_finite(s, Side::plus, 1.0));
  CHECK_FALSE(side_exponential_moment_finite(s, Side::plus, 1.0001));
  const auto g = TSAlphaSpec::one_sided(0.6, 1.0, TemperingFunction::gtgs(0.0, 1.0, 0.5));
  CHECK(side_exponential_moment_finite(g, Side::plus, 0.0));
  CHECK_FALSE(side_exponential_moment_finite(g, Side::plus, 1e-3));
}

TEST_CASE("spec validation") {
  const auto q = TemperingFunction::exponential(1.0);
  CHECK_THROWS_AS(TSAlphaSpec(2.0, 1.0, q, 0.0, q), DomainError);
  CHECK_THROWS_AS(TSAlphaSpec(0.0, 1.0, q, 0.0, q), DomainError);
  CHECK_THROWS_AS(TSAlphaSpec(0.5, 0.0, q, 0.0, q), DomainError);
  CHECK_THROWS_AS(TSAlphaSpec(0.5, -1.0, q, 2.0, q), DomainError);
  CHECK_THROWS_AS(TSAlphaSpec::one_sided(0.6, 1.0, TemperingFunction::kr(0.5, 0.3, 2.0)), DomainError);
  CHECK_THROWS_AS(complex_cumulant(exp_spec(), C(1.5, 0.0)), DomainError);
  CHECK_THROWS_AS(make_nu1(reflect(exp_spec())), DomainError);
}
