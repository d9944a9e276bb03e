#pragma once

// out[j] = sum_k wr[k] cos(u[k] x[j]) + wi[k] sin(u[k] x[j])
//
// The inner loop of every Fourier inversion. The scalar version is the
// reference; the AVX2 version evaluates four nodes per step with a
// polynomial sincos and is selected at runtime when the CPU supports it.

#include <cstddef>
#include <string_view>

namespace tsa::kernels {

using TrigSumFn = void (*)(const double* u, const double* wr, const double* wi,
                           std::size_t n_nodes, const double* x, double* out,
                           std::size_t n_x);

void trig_sum_scalar(const double* u, const double* wr, const double* wi, std::size_t n_nodes,
                     const double* x, double* out, std::size_t n_x);

#if defined(TSA_HAVE_AVX2_KERNEL)
void trig_sum_avx2(const double* u, const double* wr, const double* wi, std::size_t n_nodes,
                   const double* x, double* out, std::size_t n_x);
#endif

enum class Backend { scalar, avx2 };

/// Best backend for this CPU (AVX2 + FMA when compiled in and supported).
Backend detected_backend();
std::string_view to_string(Backend b);
/// Function pointer for a backend; throws DomainError if it is unavailable.
TrigSumFn trig_sum_for(Backend b);

/// Dispatches to detected_backend().
void trig_sum(const double* u, const double* wr, const double* wi, std::size_t n_nodes,
              const double* x, double* out, std::size_t n_x);

}  // namespace tsa::kernels
