#pragma once

// The TSα law: Lévy density delta± q±(|x|)/|x|^{1+alpha}, its tails, the
// normalized big-jump law nu1 and the Lévy-Khintchine exponent.

#include <complex>
#include <memory>
#include <string>

#include "tsa/tabulated.hpp"
#include "tsa/tempering.hpp"

namespace tsa {

enum class Side { plus, minus };

namespace detail {
class TransformCache;
std::shared_ptr<TransformCache> make_transform_cache();
}  // namespace detail

/// Parameters of a TSα law with triplet (b, 0, nu). Immutable; copies share
/// the tabulated tempering functions.
class TSAlphaSpec {
 public:
  TSAlphaSpec(double alpha, double delta_plus, TemperingFunction q_plus, double delta_minus,
              TemperingFunction q_minus, double drift_b = 0.0);
  /// delta_minus = 0; q is reused as the (inactive) negative tempering.
  static TSAlphaSpec one_sided(double alpha, double delta, TemperingFunction q,
                               double drift_b = 0.0);

  double alpha() const noexcept { return alpha_; }
  double delta_plus() const noexcept { return delta_plus_; }
  double delta_minus() const noexcept { return delta_minus_; }
  double drift_b() const noexcept { return drift_b_; }
  double delta(Side s) const noexcept { return s == Side::plus ? delta_plus_ : delta_minus_; }

  const TemperingFunction& q_plus() const noexcept { return plus_->function(); }
  const TemperingFunction& q_minus() const noexcept { return minus_->function(); }
  const TabulatedTempering& tempering(Side s) const noexcept {
    return s == Side::plus ? *plus_ : *minus_;
  }
  double gamma_plus() const noexcept { return plus_->tail_index(); }
  double gamma_minus() const noexcept { return minus_->tail_index(); }

  /// Interval of real s where the m.g.f. is finite; infinite ends for an
  /// inactive side.
  double mgf_lower() const noexcept;
  double mgf_upper() const noexcept;

  std::string describe() const;
  bool operator==(const TSAlphaSpec& other) const;

  /// Lazily built Fourier tables shared by copies of this spec.
  detail::TransformCache& transform_cache() const noexcept { return *cache_; }

  friend TSAlphaSpec reflect(const TSAlphaSpec& spec);

 private:
  TSAlphaSpec() = default;
  void validate() const;

  double alpha_ = 0.0;
  double delta_plus_ = 0.0;
  double delta_minus_ = 0.0;
  double drift_b_ = 0.0;
  std::shared_ptr<const TabulatedTempering> plus_;
  std::shared_ptr<const TabulatedTempering> minus_;
  std::shared_ptr<detail::TransformCache> cache_;
};

/// Law of -X: swaps the sides and negates the drift.
TSAlphaSpec reflect(const TSAlphaSpec& spec);

/// delta± q±(|x|) / |x|^{1+alpha}. Throws DomainError at x = 0.
double levy_density(const TSAlphaSpec& spec, double x);

/// nu([x, inf)) for x > 0.
double levy_tail(const TSAlphaSpec& spec, double x);
/// log nu([x, inf)), finite where the tail itself underflows.
double log_levy_tail(const TSAlphaSpec& spec, double x);

/// nu restricted to (1, inf) and normalized by nu([1, inf)).
struct Nu1Law {
  TSAlphaSpec parent;
  double normalizer;
};

/// Throws DomainError when delta_plus = 0 (nu1 would be empty).
Nu1Law make_nu1(const TSAlphaSpec& spec);

double nu1_density(const Nu1Law& n, double x);
double nu1_tail(const Nu1Law& n, double x);
/// int e^{s x} nu1(dx); +infinity when the integral diverges.
double nu1_mgf(const Nu1Law& n, double s);

/// Does int_{x>1} e^{s x} nu(dx) converge on the given side? (For the minus
/// side the integrand is e^{-s x}.) Decided from the decay of the integrand.
bool side_exponential_moment_finite(const TSAlphaSpec& spec, Side side, double s);

/// kappa(w) = w b + int (e^{w x} - 1 - w x 1{|x|<1}) nu(dx) for complex w with
/// Re w inside [mgf_lower, mgf_upper]. Throws DomainError outside.
std::complex<double> complex_cumulant(const TSAlphaSpec& spec, std::complex<double> w);

/// psi(u) = kappa(i u); the characteristic function is exp(psi(u)).
std::complex<double> characteristic_exponent(const TSAlphaSpec& spec, double u);

/// Real cumulant; +infinity outside the m.g.f. domain.
double cumulant(const TSAlphaSpec& spec, double s);
double mgf(const TSAlphaSpec& spec, double s);

}  // namespace tsa
