#pragma once

// Run configuration for the command-line front end.
//
//   # comment
//   command = report
//   alpha = 0.5
//   delta_plus = 1
//   [plus]
//   kind = exponential
//   theta = 1
//
// Unknown keys, duplicate keys and out-of-range values are errors that name
// the line.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tsa/levy.hpp"

namespace tsa {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& reason);
  int line() const noexcept { return line_; }  // 0 when not tied to a line

 private:
  int line_;
};

enum class Command { eval_tempering, density, tails, convcheck, report };
std::string to_string(Command c);

struct TemperingConfig {
  std::string kind = "exponential";  // exponential, kr, gtgs, atoms, weibull
  double theta = 1.0;
  double p = 0.0;
  double r = 1.0;
  double lambda = 1.0;
  double gamma_ml = 0.5;
  double k = 2.0;      // weibull shape
  double scale = 1.0;  // weibull scale
  std::vector<std::pair<double, double>> atoms;  // (location, mass)
};

/// Control law replacing the spec in convcheck and adding a curve in report.
struct ControlConfig {
  std::string kind;  // exponential or gamma
  double rate = 1.0;
  double shape = 2.0;
};

struct RunConfig {
  Command command = Command::report;
  double alpha = 0.5;
  double delta_plus = 1.0;
  double delta_minus = 0.0;
  double drift_b = 0.0;
  TemperingConfig plus;
  TemperingConfig minus;
  bool minus_given = false;

  double x_min = 0.0;
  double x_max = 0.0;
  int n_points = 0;  // 0: per-command defaults
  bool log_spacing = false;
  double y = 1.0;
  double tol = 1e-6;  // pointwise inversion tolerance
  std::optional<ControlConfig> control;
  std::string output_path;  // empty: --out or ./out
};

RunConfig parse_config(const std::string& text);

/// Builds the law. Throws ConfigError when a tempering function is rejected
/// (for instance a Weibull candidate that is not completely monotone).
TSAlphaSpec build_spec(const RunConfig& cfg);

/// Canonical `key = value` text with every default spelled out.
std::string canonical_text(const RunConfig& cfg);
/// FNV-1a of canonical_text, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace tsa
