#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tsa/error.hpp"
#include "tsa/kernels/trig_sum.hpp"

using namespace tsa::kernels;

namespace {

struct Problem {
  std::vector<double> u, wr, wi, x;
};

Problem random_problem(std::size_t nodes, std::size_t nx, double u_max, double x_max,
                       unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uu(0.0, u_max), ww(-1.0, 1.0), xx(-x_max, x_max);
  Problem p;
  for (std::size_t k = 0; k < nodes; ++k) {
    p.u.push_back(uu(rng));
    p.wr.push_back(ww(rng));
    p.wi.push_back(ww(rng));
  }
  for (std::size_t j = 0; j < nx; ++j) p.x.push_back(xx(rng));
  return p;
}

// long double reference
std::vector<double> reference(const Problem& p) {
  std::vector<double> out(p.x.size());
  for (std::size_t j = 0; j < p.x.size(); ++j) {
    long double s = 0;
    for (std::size_t k = 0; k < p.u.size(); ++k) {
      const long double a = p.u[k] * p.x[j];  // same rounded argument as the kernels
      s += p.wr[k] * std::cos(a) + p.wi[k] * std::sin(a);
    }
    out[j] = static_cast<double>(s);
  }
  return out;
}

double weight_mass(const Problem& p) {
  double m = 0;
  for (std::size_t k = 0; k < p.u.size(); ++k) m += std::abs(p.wr[k]) + std::abs(p.wi[k]);
  return m;
}

std::vector<double> run(TrigSumFn fn, const Problem& p) {
  std::vector<double> out(p.x.size(), -99.0);
  fn(p.u.data(), p.wr.data(), p.wi.data(), p.u.size(), p.x.data(), out.data(), p.x.size());
  return out;
}

}  // namespace

TEST_CASE("scalar kernel matches a long double sum") {
  const auto p = random_problem(257, 33, 40.0, 30.0, 1);
  const auto got = run(trig_sum_for(Backend::scalar), p);
  const auto ref = reference(p);
  const double scale = weight_mass(p);
  for (std::size_t j = 0; j < ref.size(); ++j) CHECK(std::abs(got[j] - ref[j]) < 1e-14 * scale);
}

TEST_CASE("detected backend is usable") {
  const Backend b = detected_backend();
  CHECK((to_string(b) == "avx2" || to_string(b) == "scalar"));
  CHECK(trig_sum_for(b) != nullptr);
  CHECK(trig_sum_for(Backend::scalar) == &trig_sum_scalar);
  MESSAGE("trig_sum backend: " << to_string(b));
}

TEST_CASE("avx2 and scalar kernels agree") {
  if (detected_backend() != Backend::avx2) {
    CHECK_THROWS_AS(trig_sum_for(Backend::avx2), tsa::DomainError);
    return;
  }
  // node counts that are not multiples of the vector width exercise the tail loop
  for (std::size_t nodes : {1u, 3u, 4u, 5u, 63u, 1000u}) {
    for (double u_max : {1e-3, 1.0, 50.0, 5e4}) {
      const auto p = random_problem(nodes, 17, u_max, 100.0, 7 + nodes);
      const auto a = run(trig_sum_for(Backend::scalar), p);
      const auto b = run(trig_sum_for(Backend::avx2), p);
      const double scale = weight_mass(p);
      for (std::size_t j = 0; j < a.size(); ++j) {
        CAPTURE(nodes);
        CAPTURE(u_max);
        CHECK(std::abs(a[j] - b[j]) <= 1e-14 * scale);
      }
    }
  }
}

TEST_CASE("avx2 kernel handles huge arguments through the scalar path") {
  if (detected_backend() != Backend::avx2) return;
  auto p = random_problem(40, 5, 1e6, 1.0, 11);
  p.x = {2e4, -3e5, 1e7, 4e5, -8e6};
  const auto a = run(trig_sum_for(Backend::scalar), p);
  const auto b = run(trig_sum_for(Backend::avx2), p);
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
}

TEST_CASE("empty inputs") {
  const double u = 1.0, w = 1.0, x = 0.5;
  double out = 5.0;
  trig_sum(&u, &w, &w, 0, &x, &out, 1);
  CHECK(out == 0.0);
  trig_sum(&u, &w, &w, 1, &x, &out, 0);
  CHECK(out == 0.0);
  trig_sum(&u, &w, &w, 1, &x, &out, 1);
  CHECK(out == doctest::Approx(std::cos(0.5) + std::sin(0.5)).epsilon(1e-15));
}
