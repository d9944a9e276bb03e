#include "tsa/tabulated.hpp"

#include <cmath>

namespace tsa {

namespace {

const double kLogLo = std::log(1e-8);
const double kLogHi = std::log(1e8);
constexpr int kPanels = 148;
constexpr int kDegree = 16;
constexpr double kAcceptError = 1e-12;

}  // namespace

TabulatedTempering::TabulatedTempering(TemperingFunction q) : q_(std::move(q)) {
  // the exponential kind has log_tilted == 0, nothing to tabulate
  if (q_.kind() == TemperingFunction::Kind::exponential) return;
  ChebyshevTable<double> table([this](double t) { return q_.log_tilted(std::exp(t)); },
                               kLogLo, kLogHi, kPanels, kDegree);
  // self check between the interpolation nodes
  const double width = (kLogHi - kLogLo) / kPanels;
  double worst = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    for (double frac : {0.137, 0.5, 0.911}) {
      const double t = kLogLo + (p + frac) * width;
      worst = std::max(worst, std::abs(table(t) - q_.log_tilted(std::exp(t))));
    }
  }
  table_error_ = worst;
  if (worst <= kAcceptError) table_ = std::move(table);
}

double TabulatedTempering::log_tilted(double x) const {
  if (!table_.empty() && x > 0.0) {
    const double t = std::log(x);
    if (table_.contains(t)) return table_(t);
  }
  return q_.log_tilted(x);
}

double TabulatedTempering::eval(double x) const {
  return std::exp(log_tilted(x) - q_.tail_index() * x);
}

}  // namespace tsa
