#include "tsa/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tsa/density.hpp"
#include "tsa/error.hpp"

namespace tsa {

namespace {

namespace fs = std::filesystem;

std::string metadata(const std::string& hash, const std::string& command) {
  return "# tool = tsa\n# command = " + command + "\n# config_hash = " + hash + "\n";
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << body;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

std::vector<double> grid_or(const RunConfig& cfg, double a, double b, int n, bool log_spacing) {
  if (cfg.x_max > cfg.x_min) {
    return make_grid(cfg.x_min, cfg.x_max, cfg.n_points > 0 ? cfg.n_points : n, cfg.log_spacing);
  }
  return make_grid(a, b, cfg.n_points > 0 ? cfg.n_points : n, log_spacing);
}

void print_curves(const std::vector<RatioCurve>& curves, std::ostream& log) {
  for (const auto& c : curves) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "  %-24s converged=%-5s last_rel_gap=%-12.4g target=%.10g\n",
                  c.name.c_str(), c.converged ? "true" : "false", c.last_rel_gap, c.target);
    log << buf;
    if (!c.note.empty()) log << "    note: " << c.note << "\n";
  }
}

int finish_curves(const std::vector<RatioCurve>& curves, Verdict v, const RunConfig& cfg,
                  const fs::path& out, bool quiet, std::ostream& log,
                  const std::vector<std::string>& failures = {}) {
  const std::string hash = config_hash(cfg), command = to_string(cfg.command);
  for (const auto& c : curves) write_file(out / (c.name + ".csv"), curve_csv(c, hash, command));
  write_file(out / "summary.csv", summary_csv(curves, hash, command, to_string(v)));
  if (!quiet) {
    print_curves(curves, log);
    for (const auto& f : failures) log << "  failure: " << f << "\n";
    log << "verdict: " << to_string(v) << "\n";
  }
  return exit_code_for(v);
}

int run_eval_tempering(const RunConfig& cfg, const TSAlphaSpec& spec, const fs::path& out,
                       bool quiet, std::ostream& log) {
  const auto xs = grid_or(cfg, 0.1, 100.0, 200, true);
  std::ostringstream os;
  os << (cfg.minus_given ? "x,q_plus,q_minus\n" : "x,q_plus\n");
  for (double x : xs) {
    os << csv_number(x) << "," << csv_number(spec.q_plus().eval(x));
    if (cfg.minus_given) os << "," << csv_number(spec.q_minus().eval(x));
    os << "\n";
  }
  os << metadata(config_hash(cfg), to_string(cfg.command));
  write_file(out / "tempering.csv", os.str());
  if (!quiet) log << "wrote " << xs.size() << " rows to " << (out / "tempering.csv").string() << "\n";
  return kExitOk;
}

int run_density(const RunConfig& cfg, const TSAlphaSpec& spec, const fs::path& out, bool quiet,
                std::ostream& log) {
  std::vector<double> xs;
  if (cfg.x_max > cfg.x_min) {
    xs = grid_or(cfg, 0, 0, 200, false);
  } else {
    const auto [a, b] = auto_domain(spec, 1e-6);
    xs = make_grid(a, b, cfg.n_points > 0 ? cfg.n_points : 200, false);
  }
  const auto p = pdf_points(spec, xs, cfg.tol);
  const auto s = sf_points(spec, xs, cfg.tol);
  std::ostringstream os;
  os << "x,pdf,sf,abs_err\n";
  int unresolved = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!p[i].converged || !s[i].converged) ++unresolved;
    // ringing below zero is clipped here only
    os << csv_number(xs[i]) << "," << csv_number(std::max(p[i].value, 0.0)) << ","
       << csv_number(std::clamp(s[i].value, 0.0, 1.0)) << "," << csv_number(p[i].abs_error) << "\n";
  }
  os << metadata(config_hash(cfg), to_string(cfg.command));
  write_file(out / "density.csv", os.str());
  if (!quiet) {
    log << "wrote " << xs.size() << " rows to " << (out / "density.csv").string() << "\n";
    if (unresolved) log << "  " << unresolved << " points did not reach tol " << cfg.tol << "\n";
  }
  return unresolved ? kExitInconclusive : kExitOk;
}

std::vector<RatioCurve> control_curves(const RunConfig& cfg, std::span<const double> xs) {
  std::vector<RatioCurve> curves;
  const auto& c = *cfg.control;
  const RawLaw law = c.kind == "gamma" ? gamma_law(c.shape, c.rate) : exponential_law(c.rate);
  RatioCurve d = conv_equiv_dist_curve(law, xs);
  d.name = "conv_equiv_dist_control";
  curves.push_back(d);
  if (c.kind == "gamma") curves.push_back(gamma_counterexample_curve(c.shape, c.rate, xs));
  return curves;
}

}  // namespace

int exit_code_for(Verdict v) {
  switch (v) {
    case Verdict::consistent: return kExitOk;
    case Verdict::inconclusive: return kExitInconclusive;
    case Verdict::inconsistent: return kExitInconsistent;
  }
  return kExitOperational;
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string curve_csv(const RatioCurve& c, const std::string& hash, const std::string& command) {
  std::ostringstream os;
  os << "x,value,target,rel_gap\n";
  const auto gaps = c.rel_gaps();
  for (std::size_t i = 0; i < c.xs.size(); ++i)
    os << csv_number(c.xs[i]) << "," << csv_number(c.values[i]) << "," << csv_number(c.target)
       << "," << csv_number(gaps[i]) << "\n";
  os << metadata(hash, command) << "# curve = " << c.name << "\n# converged = "
     << (c.converged ? "true" : "false") << "\n";
  return os.str();
}

std::string summary_csv(const std::vector<RatioCurve>& curves, const std::string& hash,
                        const std::string& command, const std::string& verdict) {
  std::ostringstream os;
  os << "curve_name,converged,last_rel_gap,target\n";
  for (const auto& c : curves)
    os << c.name << "," << (c.converged ? "true" : "false") << "," << csv_number(c.last_rel_gap)
       << "," << csv_number(c.target) << "\n";
  os << metadata(hash, command) << "# verdict = " << verdict << "\n";
  return os.str();
}

int run(const RunConfig& cfg, const std::string& out_dir, bool quiet, std::ostream& log) {
  const fs::path out(out_dir);
  fs::create_directories(out);
  const TSAlphaSpec spec = build_spec(cfg);
  if (!quiet) log << "law: " << spec.describe() << "\n";

  switch (cfg.command) {
    case Command::eval_tempering: return run_eval_tempering(cfg, spec, out, quiet, log);
    case Command::density: return run_density(cfg, spec, out, quiet, log);
    case Command::tails: {
      ReportConfig rc = default_report_config(spec);
      const auto xs = cfg.x_max > cfg.x_min ? grid_or(cfg, 0, 0, 24, false) : rc.xs_density;
      std::vector<RatioCurve> curves;
      if (spec.delta_plus() > 0.0) {
        curves.push_back(class_l_curve(spec, cfg.y, xs, cfg.tol));
        curves.push_back(corollary_tail_curve(spec, Side::plus, xs, cfg.tol));
      }
      if (spec.delta_minus() > 0.0)
        curves.push_back(corollary_tail_curve(spec, Side::minus, xs, cfg.tol));
      return finish_curves(curves, verdict_of(curves), cfg, out, quiet, log);
    }
    case Command::convcheck: {
      std::vector<RatioCurve> curves;
      if (cfg.control) {
        const auto xs = grid_or(cfg, 1.0, 5000.0, 24, true);
        curves = control_curves(cfg, xs);
      } else {
        const ReportConfig rc = default_report_config(spec);
        const auto xs = cfg.x_max > cfg.x_min ? grid_or(cfg, 0, 0, 24, false) : rc.xs_survival;
        const auto xn = cfg.x_max > cfg.x_min ? xs : rc.xs_nu1;
        curves.push_back(conv_equiv_nu1_curve(spec, xn));
        curves.push_back(conv_equiv_dist_curve(spec, xs, cfg.tol));
      }
      return finish_curves(curves, verdict_of(curves), cfg, out, quiet, log);
    }
    case Command::report: {
      ReportConfig rc = default_report_config(spec);
      rc.y = cfg.y;
      rc.point_tol = cfg.tol;
      if (cfg.x_max > cfg.x_min) {
        rc.xs_survival = rc.xs_density = rc.xs_nu1 = grid_or(cfg, 0, 0, 24, false);
      }
      DiagnosticsReport rep = run_full_report(spec, rc);
      if (cfg.control) {
        const auto xs = grid_or(cfg, 1.0, 5000.0, 24, true);
        for (auto& c : control_curves(cfg, xs)) rep.curves.push_back(std::move(c));
        rep.verdict = verdict_of(rep.curves);
        if (!rep.failures.empty() && rep.verdict == Verdict::consistent)
          rep.verdict = Verdict::inconclusive;
      }
      std::ostringstream mom;
      mom << "s,mgf_finite,nu1_mgf_finite\n";
      for (const auto& r : rep.moments.rows)
        mom << csv_number(r.s) << "," << (r.mgf_finite ? "true" : "false") << ","
            << (r.nu1_mgf_finite ? "true" : "false") << "\n";
      mom << metadata(config_hash(cfg), to_string(cfg.command))
          << "# mean_finite = " << (rep.moments.mean_finite ? "true" : "false")
          << "\n# variance_finite = " << (rep.moments.variance_finite ? "true" : "false")
          << "\n# disagreements = " << rep.moments.disagreements << "\n";
      for (const auto& [k, v] : rep.constants) mom << "# " << k << " = " << csv_number(v) << "\n";
      write_file(out / "moments.csv", mom.str());
      return finish_curves(rep.curves, rep.verdict, cfg, out, quiet, log, rep.failures);
    }
  }
  return kExitOperational;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Tempered stable laws: densities, tails and convolution-equivalence checks"};
  std::string config_path, out_dir = "./out";
  double tol = 0.0;
  bool quiet = false;
  app.add_option("--config", config_path, "configuration file")->required();
  auto* out_opt = app.add_option("--out", out_dir, "output directory (default ./out)");
  auto* tol_opt = app.add_option("--tol", tol, "pointwise inversion tolerance");
  app.add_flag("--quiet", quiet, "no summary on stdout");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitOperational;
  }

  try {
    std::ifstream f(config_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + config_path);
    std::stringstream buf;
    buf << f.rdbuf();
    RunConfig cfg = parse_config(buf.str());
    if (tol_opt->count()) {
      if (!(tol >= 1e-12 && tol < 1.0)) throw ConfigError(0, "--tol must lie in [1e-12, 1)");
      cfg.tol = tol;
    }
    if (!out_opt->count() && !cfg.output_path.empty()) out_dir = cfg.output_path;
    return run(cfg, out_dir, quiet, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitOperational;
}

}  // namespace tsa
