#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tsa/config.hpp"
#include "tsa/diagnostics.hpp"

namespace tsa {

enum ExitCode : int { kExitOk = 0, kExitOperational = 1, kExitInconclusive = 2, kExitInconsistent = 3 };

int exit_code_for(Verdict v);

/// Runs one configured command, writing CSV files into out_dir and a short
/// summary to `log` (nothing when quiet). Errors propagate as exceptions.
int run(const RunConfig& cfg, const std::string& out_dir, bool quiet, std::ostream& log);

/// Entry point behind the tools/ executable: flag parsing, config loading,
/// and the error-to-exit-code mapping.
int cli_main(int argc, char** argv);

/// CSV helpers; every number is written with 17 significant digits.
std::string csv_number(double v);
std::string curve_csv(const RatioCurve& c, const std::string& hash, const std::string& command);
std::string summary_csv(const std::vector<RatioCurve>& curves, const std::string& hash,
                        const std::string& command, const std::string& verdict);

}  // namespace tsa
