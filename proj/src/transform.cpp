#include "tsa/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "tsa/error.hpp"
#include "tsa/kernels/trig_sum.hpp"
#include "tsa/quadrature.hpp"

namespace tsa {

namespace {

using C = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kUCap = 1e8;
constexpr double kTableWidth = 0.5;
constexpr int kTableDegree = 16;
constexpr double kTableAccept = 1e-12;
constexpr std::size_t kMaxNodes = 40'000'000;

TiltTable build_tilt_table(const TSAlphaSpec& spec, double s) {
  TiltTable t;
  t.s = s;
  t.kappa_s = s == 0.0 ? 0.0 : complex_cumulant(spec, C(s, 0.0)).real();
  auto delta = [&](double u) { return complex_cumulant(spec, C(s, u)) - t.kappa_s; };

  double u = 1.0;
  double decay = delta(u).real();
  while (decay > -TiltTable::kDecayTarget && u < kUCap) {
    u *= 2.0;
    decay = delta(u).real();
  }
  t.u_hi = u;
  t.decay_at_u_hi = decay;

  const double lo = std::log(TiltTable::kULo), hi = std::log(u);
  auto in_log = [&](double tt) { return delta(std::exp(tt)); };
  for (double width = kTableWidth;; width *= 0.5) {
    const int panels = static_cast<int>(std::ceil((hi - lo) / width));
    ChebyshevTable<C> table(in_log, lo, hi, panels, kTableDegree);
    // check halfway between nodes, weighted by |exp(delta)| since only
    // exp(delta) is ever used
    const double pw = (hi - lo) / panels;
    double worst = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double tt = lo + (p + 0.5) * pw + 0.013 * pw;
      const C exact = in_log(tt);
      const double weight = std::exp(std::min(0.0, exact.real()));
      worst = std::max(worst, std::abs(table(tt) - exact) * weight);
    }
    t.table_error = worst;
    t.delta = std::move(table);
    if (worst <= kTableAccept || width < kTableWidth / 4.0) break;
  }
  return t;
}

struct Nodes {
  std::vector<double> u;
  std::vector<double> w;
};

// composite Gauss-Legendre: geometric panels from u_lo up to u_g, then
// uniform panels of width h up to u_hi
Nodes build_nodes(double u_lo, double u_g, double h, double u_hi, const quad::GaussLegendre& gl) {
  std::vector<std::pair<double, double>> panels;
  double a = u_lo;
  while (a < u_g) {
    const double b = std::min(2.0 * a, u_g);
    panels.emplace_back(a, b);
    a = b;
  }
  const auto n_uniform = static_cast<std::size_t>(std::ceil((u_hi - a) / h));
  if ((panels.size() + n_uniform) * gl.nodes.size() > kMaxNodes)
    throw DomainError("inversion: |x| too large for the frequency grid");
  for (std::size_t k = 0; k < n_uniform; ++k) {
    const double lo = a + k * h;
    panels.emplace_back(lo, std::min(lo + h, u_hi));
  }
  Nodes out;
  out.u.reserve(panels.size() * gl.nodes.size());
  out.w.reserve(panels.size() * gl.nodes.size());
  for (const auto& [lo, hi] : panels) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      out.u.push_back(mid + half * gl.nodes[i]);
      out.w.push_back(half * gl.weights[i]);
    }
  }
  return out;
}

enum class Form { tilted, gil_pelaez };

struct Weighted {
  std::vector<double> u, wr, wi;
  double abs_sum = 0.0;
};

Weighted weigh(const Nodes& nodes, const TiltTable& table, int n, Form form) {
  Weighted out;
  const std::size_t m = nodes.u.size();
  out.u = nodes.u;
  out.wr.resize(m);
  out.wi.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double u = nodes.u[k];
    const C e = std::exp(static_cast<double>(n) * table(u));
    const double w = nodes.w[k] / std::numbers::pi;
    if (form == Form::gil_pelaez) {
      out.wr[k] = w * e.imag() / u;
      out.wi[k] = -w * e.real() / u;
    } else {
      out.wr[k] = w * e.real();
      out.wi[k] = w * e.imag();
    }
    out.abs_sum += std::abs(out.wr[k]) + std::abs(out.wi[k]);
  }
  return out;
}

}  // namespace

C TiltTable::operator()(double u) const {
  if (u <= kULo) return {};
  const double t = std::log(u);
  if (t > delta.hi()) return {-800.0, 0.0};
  return delta(t);
}

namespace detail {

std::shared_ptr<TransformCache> make_transform_cache() { return std::make_shared<TransformCache>(); }

std::shared_ptr<const TiltTable> TransformCache::table(const TSAlphaSpec& spec, double s) {
  std::lock_guard<std::mutex> lock(mutex_);
  for (const auto& t : tables_)
    if (t->s == s) return t;
  auto t = std::make_shared<const TiltTable>(build_tilt_table(spec, s));
  tables_.push_back(t);
  return t;
}

}  // namespace detail

Inverter::Inverter(TSAlphaSpec spec, int n_fold) : spec_(std::move(spec)), n_(n_fold) {
  if (n_fold < 1) throw DomainError("inverter: n_fold must be >= 1");
  const double lo = spec_.mgf_lower(), hi = spec_.mgf_upper();
  if (lo < 0.0 && hi > 0.0) {
    const double h = 1e-4 * std::min({1.0, -lo, hi});
    centre_ = n_ * (cumulant(spec_, h) - cumulant(spec_, -h)) / (2.0 * h);
  } else {
    centre_ = n_ * spec_.drift_b();
  }
}

double Inverter::tilt_for(double x) const {
  if (x >= centre_) {
    const double hi = spec_.mgf_upper();
    return std::isfinite(hi) && hi > 0.0 ? hi : 0.0;
  }
  const double lo = spec_.mgf_lower();
  return std::isfinite(lo) && lo < 0.0 ? lo : 0.0;
}

std::vector<InversionResult> Inverter::evaluate(InversionTarget target, std::span<const double> xs,
                                                double tol) const {
  std::vector<InversionResult> out(xs.size());
  std::map<double, std::vector<std::size_t>> by_tilt;
  for (std::size_t i = 0; i < xs.size(); ++i) by_tilt[tilt_for(xs[i])].push_back(i);
  for (const auto& [s, idx] : by_tilt) {
    std::vector<double> sub;
    for (auto i : idx) sub.push_back(xs[i]);
    auto r = evaluate_at_tilt(target, s, sub, tol);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = r[k];
  }
  return out;
}

std::vector<InversionResult> Inverter::evaluate_at_tilt(InversionTarget target, double s,
                                                        std::span<const double> xs,
                                                        double tol) const {
  if (s > spec_.mgf_upper() || s < spec_.mgf_lower())
    throw DomainError("inversion: tilt outside the m.g.f. domain");
  const auto table = spec_.transform_cache().table(spec_, s);
  const Form form = (target == InversionTarget::sf && s == 0.0) ? Form::gil_pelaez : Form::tilted;
  // cdf instead of sf when tilting left: F = -e^{-sx} M(s)^n (1/pi) int Re(...)
  const double sign = (target == InversionTarget::sf && s < 0.0) ? -1.0 : 1.0;
  const double drift_scale = std::abs(table->delta(0.0).imag());

  static const quad::GaussLegendre gl16(16), gl10(10);
  std::vector<InversionResult> out(xs.size());

  // group by octave of the effective phase rate so small x do not pay for large x
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x_eff = std::abs(xs[i]) + n_ * drift_scale + 1.0;
    groups[static_cast<int>(std::ceil(std::log2(x_eff)))].push_back(i);
  }

  for (const auto& [octave, idx] : groups) {
    const double x_eff = std::ldexp(1.0, octave);
    const double h = std::min({kTableWidth, std::numbers::pi / x_eff, table->u_hi / 8.0});
    const double u_g = h;
    std::vector<double> xv;
    for (auto i : idx) xv.push_back(xs[i]);

    std::vector<double> sum16(xv.size()), sum10(xv.size());
    double abs16 = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
      const auto& gl = pass == 0 ? gl16 : gl10;
      const Nodes nodes = build_nodes(TiltTable::kULo, u_g, h, table->u_hi, gl);
      Weighted wgt = weigh(nodes, *table, n_, form);
      if (form == Form::tilted) {
        // divide by (s + iu) for the survival function
        if (target == InversionTarget::sf) {
          wgt.abs_sum = 0.0;
          for (std::size_t k = 0; k < wgt.u.size(); ++k) {
            const C f = C(wgt.wr[k], wgt.wi[k]) / C(s, wgt.u[k]);
            wgt.wr[k] = f.real();
            wgt.wi[k] = f.imag();
            wgt.abs_sum += std::abs(f.real()) + std::abs(f.imag());
          }
        }
        for (auto& v : wgt.wr) v *= sign;
        for (auto& v : wgt.wi) v *= sign;
      }
      auto& dst = pass == 0 ? sum16 : sum10;
      kernels::trig_sum(wgt.u.data(), wgt.wr.data(), wgt.wi.data(), wgt.u.size(), xv.data(),
                        dst.data(), xv.size());
      if (pass == 0) abs16 = wgt.abs_sum;
    }

    // truncation beyond u_hi and below u_lo
    double tail = std::exp(n_ * std::min(0.0, table->decay_at_u_hi)) * table->u_hi / std::numbers::pi;
    if (target == InversionTarget::sf) tail /= std::abs(C(s, table->u_hi));
    const double low = TiltTable::kULo / std::numbers::pi *
                       (form == Form::tilted && target == InversionTarget::sf && s != 0.0
                            ? 1.0 / std::abs(s)
                            : 1.0);

    for (std::size_t k = 0; k < xv.size(); ++k) {
      const double x = xv[k];
      const double I = sum16[k];
      const double err_I = std::abs(sum16[k] - sum10[k]) + 4.0 * kEps * abs16 + tail + low;
      InversionResult r;
      r.tilt = s;
      if (form == Form::gil_pelaez) {
        r.value = 0.5 + I;
        r.abs_error = err_I;
        r.log_value = r.value > 0.0 ? std::log(r.value) : -kInf;
      } else {
        const double L = -s * x + n_ * table->kappa_s;
        if (target == InversionTarget::sf && s < 0.0) {
          const double F = std::exp(L) * I;
          r.value = 1.0 - F;
          r.abs_error = std::exp(L) * err_I;
          r.log_value = F < 1.0 ? std::log1p(-F) : -kInf;
        } else {
          r.value = std::exp(L) * I;
          r.abs_error = std::exp(L) * err_I;
          r.log_value = I > 0.0 ? L + std::log(I) : -kInf;
          r.rel_error = I != 0.0 ? err_I / std::abs(I) : kInf;
        }
      }
      if (r.rel_error == 0.0)
        r.rel_error = r.value != 0.0 ? r.abs_error / std::abs(r.value) : kInf;
      r.converged = std::isfinite(r.log_value) && r.rel_error <= tol;
      out[idx[k]] = r;
    }
  }
  return out;
}

}  // namespace tsa
