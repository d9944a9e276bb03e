#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "tsa/kernels/trig_sum.hpp"

namespace tsa::kernels {

namespace {

// pi/2 split into three doubles; with FMA the first two reductions are exact
// for quadrant counts well beyond any argument used here
constexpr double kPio2A = 1.5707963267948966;
constexpr double kPio2B = 6.123233995736766e-17;
constexpr double kPio2C = -1.4973849048591698e-33;
constexpr double kTwoOverPi = 0.6366197723675814;
constexpr double kMaxArgument = 1e9;

// minimax coefficients on [-pi/4, pi/4]
constexpr double kS[] = {1.58962301576546568060e-10, -2.50507477628578072866e-8,
                         2.75573136213857245213e-6,  -1.98412698295895385996e-4,
                         8.33333333332211858878e-3,  -1.66666666666666307295e-1};
constexpr double kC[] = {-1.13585365213876817300e-11, 2.08757008419747316778e-9,
                         -2.75573141792967388112e-7,  2.48015872888517045348e-5,
                         -1.38888888888730564116e-3,  4.16666666666665929218e-2};

inline void sincos4(__m256d a, __m256d& s, __m256d& c) {
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(a, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2A), a);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2B), r);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2C), r);
  const __m256d z = _mm256_mul_pd(r, r);

  __m256d ps = _mm256_set1_pd(kS[0]);
  for (int i = 1; i < 6; ++i) ps = _mm256_fmadd_pd(ps, z, _mm256_set1_pd(kS[i]));
  const __m256d sr = _mm256_fmadd_pd(_mm256_mul_pd(ps, z), r, r);

  __m256d pc = _mm256_set1_pd(kC[0]);
  for (int i = 1; i < 6; ++i) pc = _mm256_fmadd_pd(pc, z, _mm256_set1_pd(kC[i]));
  const __m256d cr = _mm256_fmadd_pd(_mm256_mul_pd(pc, z), z,
                                     _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0)));

  // quadrant q = k mod 4: swap for odd q, negate sin for q in {2,3}, cos for q in {1,2}
  const __m128i ki = _mm256_cvtpd_epi32(k);
  const __m256i q = _mm256_cvtepi32_epi64(ki);
  const __m256i one = _mm256_set1_epi64x(1), two = _mm256_set1_epi64x(2);
  const __m256d swap = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
  const __m256d sbase = _mm256_blendv_pd(sr, cr, swap);
  const __m256d cbase = _mm256_blendv_pd(cr, sr, swap);
  const __m256d sign_bit = _mm256_set1_pd(-0.0);
  const __m256d sneg = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, two), two));
  const __m256i q1 = _mm256_add_epi64(q, one);
  const __m256d cneg = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q1, two), two));
  s = _mm256_xor_pd(sbase, _mm256_and_pd(sneg, sign_bit));
  c = _mm256_xor_pd(cbase, _mm256_and_pd(cneg, sign_bit));
}

}  // namespace

void trig_sum_avx2(const double* u, const double* wr, const double* wi, std::size_t n_nodes,
                   const double* x, double* out, std::size_t n_x) {
  const std::size_t n4 = n_nodes & ~static_cast<std::size_t>(3);
  double u_max = 0.0;
  for (std::size_t k = 0; k < n_nodes; ++k) u_max = std::max(u_max, std::abs(u[k]));
  for (std::size_t j = 0; j < n_x; ++j) {
    // quadrant counts are converted through int32
    if (u_max * std::abs(x[j]) > kMaxArgument) {
      trig_sum_scalar(u, wr, wi, n_nodes, x + j, out + j, 1);
      continue;
    }
    const __m256d xj = _mm256_set1_pd(x[j]);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    for (std::size_t k = 0; k < n4; k += 4) {
      __m256d s, c;
      sincos4(_mm256_mul_pd(_mm256_loadu_pd(u + k), xj), s, c);
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(wr + k), c, acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(wi + k), s, acc1);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
    double acc = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    for (std::size_t k = n4; k < n_nodes; ++k) {
      const double a = u[k] * x[j];
      acc += wr[k] * std::cos(a) + wi[k] * std::sin(a);
    }
    out[j] = acc;
  }
}

}  // namespace tsa::kernels
