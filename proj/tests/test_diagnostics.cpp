#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "tsa/diagnostics.hpp"
#include "tsa/error.hpp"

using namespace tsa;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TSAlphaSpec exp_spec() { return TSAlphaSpec::one_sided(0.5, 1.0, TemperingFunction::exponential(1.0)); }

RatioCurve hand_curve(std::vector<double> values, double target, double tol = 0.05) {
  RatioCurve c;
  c.name = "hand";
  c.values = std::move(values);
  for (std::size_t i = 0; i < c.values.size(); ++i) c.xs.push_back(1.0 + i);
  c.target = target;
  c.tolerance = tol;
  classify(c);
  return c;
}

}  // namespace

TEST_CASE("classify") {
  SUBCASE("settled within tolerance") {
    const auto c = hand_curve({2.0, 1.3, 1.04, 1.02, 1.01}, 1.0);
    CHECK(c.converged);
    CHECK_FALSE(c.divergent);
    CHECK(c.last_rel_gap == doctest::Approx(0.01));
  }
  SUBCASE("gap growing again") {
    const auto c = hand_curve({1.01, 1.02, 1.03, 1.04}, 1.0);
    CHECK_FALSE(c.converged);
  }
  SUBCASE("tail outside tolerance") {
    CHECK_FALSE(hand_curve({1.2, 1.1, 1.06}, 1.0).converged);
  }
  SUBCASE("too short") {
    CHECK_FALSE(hand_curve({1.0, 1.0}, 1.0).converged);
  }
  SUBCASE("divergence") {
    const auto c = hand_curve({1.0, 30.0, 2e3}, 2.0);
    CHECK(c.divergent);
    CHECK_FALSE(c.converged);
    const auto d = hand_curve({1.0, 30.0, 2e3}, kInf);
    CHECK(d.divergent);
    CHECK(d.converged);
  }
  SUBCASE("inconclusive points block convergence") {
    RatioCurve c;
    c.values = {1.0, 1.0, 1.0};
    c.xs = {1, 2, 3};
    c.target = 1.0;
    c.tolerance = 0.05;
    c.inconclusive = true;
    classify(c);
    CHECK_FALSE(c.converged);
  }
}

TEST_CASE("verdict rule") {
  const auto good = hand_curve({1.0, 1.0, 1.0}, 1.0);
  const auto open = hand_curve({1.5, 1.4, 1.3}, 1.0);
  const auto wild = hand_curve({1.0, 10.0, 5e3}, 1.0);
  CHECK(verdict_of({good, good}) == Verdict::consistent);
  CHECK(verdict_of({good, open}) == Verdict::inconclusive);
  CHECK(verdict_of({good, open, wild}) == Verdict::inconsistent);
  CHECK(verdict_of({}) == Verdict::inconclusive);
  CHECK(to_string(Verdict::inconsistent) == "inconsistent");
}

TEST_CASE("class L ratio with y = 0 is identically one") {
  const auto xs = make_grid(2.0, 40.0, 6, true);
  const auto c = class_l_curve(exp_spec(), 0.0, xs);
  for (double v : c.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.target == 1.0);
  CHECK_THROWS_AS(class_l_curve(exp_spec(), -1.0, xs), DomainError);
}

TEST_CASE("class L curve of the exponential law") {
  const auto xs = make_grid(4.0, 400.0, 12, true);
  const auto c = class_l_curve(exp_spec(), 1.0, xs);
  CHECK(c.target == doctest::Approx(std::exp(-1.0)));
  CHECK(c.converged);
  CHECK(c.last_rel_gap < 0.01);
}

TEST_CASE("nu1 convolution integrand and its bound") {
  const auto s = exp_spec();
  // with q = e^{-x} the integrand is (x/((x-z) z))^{3/2}
  CHECK(nu1_convolution_integrand(s, 10.0, 3.0) ==
        doctest::Approx(std::pow(10.0 / 21.0, 1.5)).epsilon(1e-12));
  const TSAlphaSpec k = TSAlphaSpec::one_sided(0.6, 1.0, TemperingFunction::kr(0.6, 0.3, 2.0));
  for (double x : {8.0, 50.0, 400.0})
    for (double z = 1.0; z <= x / 2; z += x / 23) {
      CAPTURE(x);
      CAPTURE(z);
      CHECK(nu1_convolution_integrand(k, x, z) <= nu1_dominating_bound(k, z) * (1 + 1e-12));
    }
}

TEST_CASE("symmetric and full nu1 convolution agree") {
  const TSAlphaSpec k = TSAlphaSpec::one_sided(0.6, 1.0, TemperingFunction::kr(0.6, 0.3, 2.0));
  for (double x : {6.0, 35.0, 300.0}) {
    CAPTURE(x);
    CHECK(nu1_convolution_ratio(k, x, true) ==
          doctest::Approx(nu1_convolution_ratio(k, x, false)).epsilon(1e-8));
  }
}

TEST_CASE("nu1 convolution curve converges for the exponential law") {
  const auto c = conv_equiv_nu1_curve(exp_spec(), make_grid(20.0, 2000.0, 10, true));
  CHECK(std::isfinite(c.target));
  CHECK(c.converged);
  CHECK_THROWS_AS(conv_equiv_nu1_curve(exp_spec(), std::vector<double>{2.0, 8.0}), DomainError);
}

TEST_CASE("control laws diverge") {
  const auto xs = make_grid(1.0, 5000.0, 24, true);
  const auto e = conv_equiv_dist_curve(exponential_law(1.0), xs);
  CHECK(e.divergent);
  CHECK(std::isinf(e.target));  // mgf at the tail index is infinite
  CHECK(e.converged);
  // Gamma(2,1) over Exp(1) tails: 1 + x
  CHECK(e.values.back() == doctest::Approx(1.0 + xs.back()).epsilon(1e-10));
  const auto g = conv_equiv_dist_curve(gamma_law(2.0, 1.0), xs);
  CHECK(g.divergent);
  CHECK(verdict_of({e}) == Verdict::inconsistent);
}

TEST_CASE("gamma counterexample curve") {
  const std::vector<double> xs{1.0, 10.0, 1e3, 1e5};
  const auto c = gamma_counterexample_curve(2.5, 0.7, xs);
  CHECK(std::isinf(c.target));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    // Gamma(2.5, 0.7) density over 2.5 x^{-1} e^{-0.7 x}
    const double expect = std::pow(0.7, 2.5) * std::pow(x, 2.5) / (2.5 * std::tgamma(2.5));
    CHECK(c.values[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(c.divergent);
  CHECK(c.converged);
}

TEST_CASE("corollary tail curve on the minus side is the reflected plus side") {
  const TSAlphaSpec s(0.6, 1.0, TemperingFunction::exponential(1.0), 0.5,
                      TemperingFunction::exponential(1.5));
  const auto xs = make_grid(5.0, 40.0, 4, true);
  const auto m = corollary_tail_curve(s, Side::minus, xs);
  const auto p = corollary_tail_curve(reflect(s), Side::plus, xs);
  CHECK(m.name == "corollary_tail_minus");
  CHECK(p.name == "corollary_tail_plus");
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(m.values[i] == doctest::Approx(p.values[i]).epsilon(1e-12));
  CHECK(m.target == doctest::Approx(p.target).epsilon(1e-14));
}

TEST_CASE("moment cross-check") {
  const auto s = exp_spec();
  const std::vector<double> grid{0.5, 1.0, 1.5};
  const auto r = moment_cross_check(s, grid);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.rows[0].mgf_finite);
  CHECK(r.rows[1].mgf_finite);
  CHECK_FALSE(r.rows[2].mgf_finite);
  for (const auto& row : r.rows) CHECK(row.mgf_finite == row.nu1_mgf_finite);
  CHECK(r.disagreements == 0);
  CHECK(r.mean_finite);
  CHECK(r.variance_finite);

  // q ~ x^{-1/2}: Lévy tail ~ x^{-1.1}, so mean finite and variance infinite
  const auto h = TSAlphaSpec::one_sided(0.6, 1.0, TemperingFunction::gtgs(0.0, 1.0, 0.5));
  CHECK(absolute_moment_finite(h, 1));
  CHECK_FALSE(absolute_moment_finite(h, 2));
  const auto hg = default_moment_grid(h);
  CHECK(hg.size() == 21);
  CHECK(hg.back() == 1.0);
  CHECK(moment_cross_check(h, hg).disagreements == 0);
  CHECK(default_moment_grid(s).back() == doctest::Approx(2.0));
}

TEST_CASE("make_grid") {
  const auto a = make_grid(0.0, 1.0, 5, false);
  CHECK(a == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  const auto b = make_grid(1.0, 1000.0, 4, true);
  CHECK(b[1] == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(b.back() == 1000.0);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 3, true), DomainError);
  CHECK_THROWS_AS(make_grid(2.0, 1.0, 3, false), DomainError);
}

TEST_CASE("full report on the exponential law") {
  const auto s = exp_spec();
  const auto rep = run_full_report(s, default_report_config(s));
  CHECK(rep.verdict == Verdict::consistent);
  CHECK(rep.failures.empty());
  REQUIRE(rep.curve("class_l") != nullptr);
  CHECK(rep.curve("no_such_curve") == nullptr);
  CHECK(rep.gamma_plus == 1.0);
  CHECK(rep.constants.count("mgf_at_gamma") == 1);
  // mgf(1) = exp(Gamma(-1/2)(-1/2) + Gamma(1/2, 1)) = exp(sqrt(pi) (1 + erfc 1))
  const double pi = 3.14159265358979323846;
  CHECK(rep.constants.at("mgf_at_gamma") ==
        doctest::Approx(std::exp(std::sqrt(pi) * (1 + std::erfc(1.0)))).epsilon(1e-10));
}
