#include "tsa/error.hpp"
#include "tsa/kernels/trig_sum.hpp"

namespace tsa::kernels {

Backend detected_backend() {
#if defined(TSA_HAVE_AVX2_KERNEL) && (defined(__GNUC__) || defined(__clang__))
  static const bool avx2 = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  if (avx2) return Backend::avx2;
#endif
  return Backend::scalar;
}

std::string_view to_string(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

TrigSumFn trig_sum_for(Backend b) {
  if (b == Backend::scalar) return &trig_sum_scalar;
#if defined(TSA_HAVE_AVX2_KERNEL)
  if (detected_backend() == Backend::avx2) return &trig_sum_avx2;
#endif
  throw DomainError("trig_sum: avx2 backend not available on this machine");
}

void trig_sum(const double* u, const double* wr, const double* wi, std::size_t n_nodes,
              const double* x, double* out, std::size_t n_x) {
  static const TrigSumFn fn = trig_sum_for(detected_backend());
  fn(u, wr, wi, n_nodes, x, out, n_x);
}

}  // namespace tsa::kernels
