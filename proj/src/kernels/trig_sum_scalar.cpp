#include <cmath>

#include "tsa/kernels/trig_sum.hpp"

namespace tsa::kernels {

void trig_sum_scalar(const double* u, const double* wr, const double* wi, std::size_t n_nodes,
                     const double* x, double* out, std::size_t n_x) {
  for (std::size_t j = 0; j < n_x; ++j) {
    const double xj = x[j];
    double acc = 0.0;
    for (std::size_t k = 0; k < n_nodes; ++k) {
      const double a = u[k] * xj;
      acc += wr[k] * std::cos(a) + wi[k] * std::sin(a);
    }
    out[j] = acc;
  }
}

}  // namespace tsa::kernels
