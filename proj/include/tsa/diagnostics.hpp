#pragma once

// Ratio curves for the tail limit statements: class L membership,
// convolution equivalence (at the nu1 level and for the law itself), the
// density tail constant and the Gamma counterexample.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsa/levy.hpp"

namespace tsa {

struct RatioCurve {
  std::string name;
  std::vector<double> xs;
  std::vector<double> values;
  double target = 0.0;  // +inf when divergence is expected
  double tolerance = 0.0;
  bool converged = false;
  bool divergent = false;     // values[last] > kDivergenceFactor * values[first]
  bool inconclusive = false;  // some point could not be evaluated to tolerance
  double last_rel_gap = 0.0;  // |values[last]/target - 1|
  std::string note;

  static constexpr double kDivergenceFactor = 1e3;

  std::vector<double> rel_gaps() const;
};

constexpr double kInversionCurveTol = 0.05;
constexpr double kQuadratureCurveTol = 0.01;

/// Fills target-dependent flags: for a finite target, converged means the
/// last three gaps are below tol and non-increasing; for an infinite one,
/// converged means divergent.
void classify(RatioCurve& curve);

/// Survival ratio F̄(x+y)/F̄(x) against e^{-gamma_plus y}.
RatioCurve class_l_curve(const TSAlphaSpec& spec, double y, std::span<const double> xs,
                         double point_tol = 1e-6);

/// (nu1 * nu1)(x) / nu1(x) against 2 nu1_mgf(gamma_plus), by quadrature
/// over [1, x/2] using the symmetry of the integrand. Needs x >= 4.
RatioCurve conv_equiv_nu1_curve(const TSAlphaSpec& spec, std::span<const double> xs);
/// Same ratio at one x; symmetric = false integrates over all of [1, x-1].
double nu1_convolution_ratio(const TSAlphaSpec& spec, double x, bool symmetric = true);
/// (x/((x-z)z))^{1+alpha} q(x-z) q(z) / q(x)
double nu1_convolution_integrand(const TSAlphaSpec& spec, double x, double z);
/// (2/z)^{1+alpha} q(z)^2 / q(2z), which dominates the integrand on [1, x/2].
double nu1_dominating_bound(const TSAlphaSpec& spec, double z);

/// A law known only through closed forms, for control runs.
struct RawLaw {
  std::string name;
  std::function<double(double)> log_sf;
  std::function<double(double)> log_pdf;
  std::function<double(double)> log_conv_sf;  // two-fold self-convolution
  double gamma = 0.0;
  double mgf_at_gamma = 0.0;  // +inf allowed
};

RawLaw exponential_law(double rate);
RawLaw gamma_law(double shape, double rate);

/// F̄*F̄(x)/F̄(x) against 2 mgf(gamma_plus).
RatioCurve conv_equiv_dist_curve(const TSAlphaSpec& spec, std::span<const double> xs,
                                 double point_tol = 1e-6);
RatioCurve conv_equiv_dist_curve(const RawLaw& law, std::span<const double> xs);

/// p(x) |x|^{1+alpha} / (delta q(|x|)) against the m.g.f. at the tail
/// index; the minus side is the plus side of the reflected law.
RatioCurve corollary_tail_curve(const TSAlphaSpec& spec, Side side, std::span<const double> xs,
                                double point_tol = 1e-6);

/// Gamma(shape, rate) density over a x^{-1} e^{-rate x}; grows like x^a.
RatioCurve gamma_counterexample_curve(double shape, double rate, std::span<const double> xs);

struct MomentCheckRow {
  double s = 0.0;
  bool mgf_finite = false;
  bool nu1_mgf_finite = false;
};

struct MomentReport {
  std::vector<MomentCheckRow> rows;
  int disagreements = 0;
  bool mean_finite = false;
  bool variance_finite = false;
};

/// Finiteness of mgf(spec, s) against finiteness of the nu1 m.g.f. decided
/// from the growth of its tail integral, plus absolute moments 1 and 2.
MomentReport moment_cross_check(const TSAlphaSpec& spec, std::span<const double> s_grid);
/// 21 points spanning [0, 2 gamma_plus], or [0, 1] when gamma_plus = 0.
std::vector<double> default_moment_grid(const TSAlphaSpec& spec);
bool absolute_moment_finite(const TSAlphaSpec& spec, int order);

enum class Verdict { consistent, inconsistent, inconclusive };
std::string to_string(Verdict v);

struct ReportConfig {
  double y = 1.0;
  double point_tol = 1e-6;
  std::vector<double> xs_survival;  // class L and convolution curves
  std::vector<double> xs_density;   // density tail curves
  std::vector<double> xs_nu1;
  std::optional<std::pair<double, double>> gamma_counterexample;  // (shape, rate)
};

/// Grids sized to where the tails are still representable for this spec.
ReportConfig default_report_config(const TSAlphaSpec& spec);

struct DiagnosticsReport {
  std::string spec_echo;
  std::vector<RatioCurve> curves;  // assembly order is fixed
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  std::map<std::string, double> constants;
  MomentReport moments;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> failures;

  const RatioCurve* curve(const std::string& name) const;
};

/// Runs every applicable curve. Numerical failures end up in `failures`
/// and make the verdict inconclusive; they are never rethrown.
DiagnosticsReport run_full_report(const TSAlphaSpec& spec, const ReportConfig& config);

/// Verdict rule: inconsistent if any curve with infinite target diverged or
/// a finite-target curve diverged; consistent if every curve converged.
Verdict verdict_of(const std::vector<RatioCurve>& curves);

/// Evenly spaced or log-spaced grid with n points on [a, b].
std::vector<double> make_grid(double a, double b, int n, bool log_spacing);

}  // namespace tsa
