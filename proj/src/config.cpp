#include "tsa/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "tsa/tempering.hpp"

namespace tsa {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& v, int line, const std::string& key) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out))
    throw ConfigError(line, "'" + key + "' expects a finite number, got '" + v + "'");
  return out;
}

int parse_int(const std::string& v, int line, const std::string& key) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError(line, "'" + key + "' expects an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(line, "'" + key + "' expects true or false, got '" + v + "'");
}

Command parse_command(const std::string& v, int line) {
  if (v == "eval-tempering") return Command::eval_tempering;
  if (v == "density") return Command::density;
  if (v == "tails") return Command::tails;
  if (v == "convcheck") return Command::convcheck;
  if (v == "report") return Command::report;
  throw ConfigError(line, "unknown command '" + v + "'");
}

// "1:0.5, 2:0.25" -> {(1, 0.5), (2, 0.25)}
std::vector<std::pair<double, double>> parse_atoms(const std::string& v, int line) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError(line, "atoms expects location:mass pairs, got '" + item + "'");
    out.emplace_back(parse_double(trim(item.substr(0, colon)), line, "atoms"),
                     parse_double(trim(item.substr(colon + 1)), line, "atoms"));
  }
  if (out.empty()) throw ConfigError(line, "atoms must list at least one location:mass pair");
  return out;
}

struct Lines {
  std::map<std::string, int> at;  // "section.key" -> line
  int of(const std::string& k) const {
    const auto it = at.find(k);
    return it == at.end() ? 0 : it->second;
  }
};

TemperingFunction named_tempering(const TemperingConfig& t, double alpha) {
  if (t.kind == "exponential") return TemperingFunction::exponential(t.theta);
  if (t.kind == "kr") return TemperingFunction::kr(alpha, t.p, t.r);
  if (t.kind == "gtgs") return TemperingFunction::gtgs(t.theta, t.lambda, t.gamma_ml);
  if (t.kind == "atoms") {
    std::vector<Atom> atoms;
    for (const auto& [s, w] : t.atoms) atoms.push_back({s, w});
    return TemperingFunction::bernstein(BernsteinMeasure::from_atoms(atoms));
  }
  throw InvalidTempering("tempering kind '" + t.kind + "' has no closed-form representation");
}

void validate_side(const TemperingConfig& t, double alpha, const std::string& sec, const Lines& L) {
  const int line = L.of(sec + ".kind");
  if (t.kind == "weibull") {
    if (!(t.k > 0.0) || !(t.scale > 0.0))
      throw ConfigError(L.of(sec + ".k"), "weibull needs k > 0 and scale > 0");
    return;  // screened in build_spec
  }
  try {
    (void)named_tempering(t, alpha);
  } catch (const InvalidTempering& e) {
    throw ConfigError(line, "[" + sec + "] " + e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(line, "[" + sec + "] " + e.what());
  }
}

TemperingFunction side_tempering(const TemperingConfig& t, double alpha, const std::string& sec) {
  if (t.kind == "weibull") {
    const double k = t.k, c = t.scale;
    try {
      validate_tempering_candidate([k, c](double x) { return std::exp(-std::pow(x / c, k)); });
    } catch (const InvalidTempering& e) {
      throw ConfigError(0, "[" + sec + "] tempering rejected: weibull(k=" + fmt(k) +
                               "): " + e.what());
    }
    if (k == 1.0) return TemperingFunction::exponential(1.0 / c);
    throw ConfigError(0, "[" + sec + "] weibull(k=" + fmt(k) +
                             ") passes the screen but has no supported representation");
  }
  return named_tempering(t, alpha);
}

std::string side_text(const TemperingConfig& t) {
  std::ostringstream os;
  os << "kind = " << t.kind << "\n";
  if (t.kind == "exponential") os << "theta = " << fmt(t.theta) << "\n";
  if (t.kind == "kr") os << "p = " << fmt(t.p) << "\nr = " << fmt(t.r) << "\n";
  if (t.kind == "gtgs")
    os << "theta = " << fmt(t.theta) << "\nlambda = " << fmt(t.lambda)
       << "\ngamma_ml = " << fmt(t.gamma_ml) << "\n";
  if (t.kind == "weibull") os << "k = " << fmt(t.k) << "\nscale = " << fmt(t.scale) << "\n";
  if (t.kind == "atoms") {
    os << "atoms = ";
    for (std::size_t i = 0; i < t.atoms.size(); ++i)
      os << (i ? ", " : "") << fmt(t.atoms[i].first) << ":" << fmt(t.atoms[i].second);
    os << "\n";
  }
  return os.str();
}

}  // namespace

ConfigError::ConfigError(int line, const std::string& reason)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + reason : reason),
      line_(line) {}

std::string to_string(Command c) {
  switch (c) {
    case Command::eval_tempering: return "eval-tempering";
    case Command::density: return "density";
    case Command::tails: return "tails";
    case Command::convcheck: return "convcheck";
    case Command::report: return "report";
  }
  return "?";
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  Lines L;
  std::string section;  // "", "plus" or "minus"
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  bool x_min_set = false, x_max_set = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "malformed section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "plus" && section != "minus")
        throw ConfigError(line, "unknown section '" + section + "' (expected plus or minus)");
      if (L.at.count(section + ".[]")) throw ConfigError(line, "duplicate section [" + section + "]");
      L.at[section + ".[]"] = line;
      if (section == "minus") cfg.minus_given = true;
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected 'key = value', got '" + s + "'");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "missing key");
    if (val.empty()) throw ConfigError(line, "missing value for '" + key + "'");
    const std::string full = section.empty() ? key : section + "." + key;
    if (L.at.count(full)) throw ConfigError(line, "duplicate key '" + key + "'");
    L.at[full] = line;

    if (section.empty()) {
      if (key == "command") cfg.command = parse_command(val, line);
      else if (key == "alpha") cfg.alpha = parse_double(val, line, key);
      else if (key == "delta_plus") cfg.delta_plus = parse_double(val, line, key);
      else if (key == "delta_minus") cfg.delta_minus = parse_double(val, line, key);
      else if (key == "drift_b") cfg.drift_b = parse_double(val, line, key);
      else if (key == "x_min") cfg.x_min = parse_double(val, line, key), x_min_set = true;
      else if (key == "x_max") cfg.x_max = parse_double(val, line, key), x_max_set = true;
      else if (key == "n_points") cfg.n_points = parse_int(val, line, key);
      else if (key == "log_spacing") cfg.log_spacing = parse_bool(val, line, key);
      else if (key == "y") cfg.y = parse_double(val, line, key);
      else if (key == "tol") cfg.tol = parse_double(val, line, key);
      else if (key == "output_path") cfg.output_path = val;
      else if (key == "control") {
        if (val != "exponential" && val != "gamma")
          throw ConfigError(line, "control must be exponential or gamma");
        if (!cfg.control) cfg.control = ControlConfig{};
        cfg.control->kind = val;
      } else if (key == "control_rate") {
        if (!cfg.control) cfg.control = ControlConfig{};
        cfg.control->rate = parse_double(val, line, key);
      } else if (key == "control_shape") {
        if (!cfg.control) cfg.control = ControlConfig{};
        cfg.control->shape = parse_double(val, line, key);
      } else {
        throw ConfigError(line, "unknown key '" + key + "'");
      }
    } else {
      TemperingConfig& t = section == "plus" ? cfg.plus : cfg.minus;
      if (key == "kind") {
        static const std::set<std::string> kinds = {"exponential", "kr", "gtgs", "atoms", "weibull"};
        if (!kinds.count(val)) throw ConfigError(line, "unknown tempering kind '" + val + "'");
        t.kind = val;
      } else if (key == "theta") t.theta = parse_double(val, line, key);
      else if (key == "p") t.p = parse_double(val, line, key);
      else if (key == "r") t.r = parse_double(val, line, key);
      else if (key == "lambda") t.lambda = parse_double(val, line, key);
      else if (key == "gamma_ml") t.gamma_ml = parse_double(val, line, key);
      else if (key == "k") t.k = parse_double(val, line, key);
      else if (key == "scale") t.scale = parse_double(val, line, key);
      else if (key == "atoms") t.atoms = parse_atoms(val, line);
      else throw ConfigError(line, "unknown key '" + key + "' in [" + section + "]");
    }
  }

  // validation
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0))
    throw ConfigError(L.of("alpha"), "alpha must lie strictly inside (0,2)");
  if (cfg.delta_plus < 0.0) throw ConfigError(L.of("delta_plus"), "delta_plus must be >= 0");
  if (cfg.delta_minus < 0.0) throw ConfigError(L.of("delta_minus"), "delta_minus must be >= 0");
  if (!(cfg.delta_plus + cfg.delta_minus > 0.0))
    throw ConfigError(L.of("delta_plus"), "delta_plus + delta_minus must be > 0");
  if (cfg.delta_minus > 0.0 && !cfg.minus_given)
    throw ConfigError(L.of("delta_minus"), "delta_minus > 0 needs a [minus] section");
  if (x_min_set != x_max_set)
    throw ConfigError(L.of(x_min_set ? "x_min" : "x_max"), "x_min and x_max must be given together");
  if (x_min_set && !(cfg.x_max > cfg.x_min))
    throw ConfigError(L.of("x_max"), "x_max must exceed x_min");
  if (cfg.n_points < 0 || (L.at.count("n_points") && cfg.n_points < 1))
    throw ConfigError(L.of("n_points"), "n_points must be >= 1");
  if (cfg.log_spacing && x_min_set && !(cfg.x_min > 0.0))
    throw ConfigError(L.of("log_spacing"), "log_spacing needs x_min > 0");
  if (!(cfg.y >= 0.0)) throw ConfigError(L.of("y"), "y must be >= 0");
  if (!(cfg.tol >= 1e-12 && cfg.tol < 1.0)) throw ConfigError(L.of("tol"), "tol must lie in [1e-12, 1)");
  if (cfg.control) {
    if (cfg.control->kind.empty())
      throw ConfigError(L.of("control_rate") ? L.of("control_rate") : L.of("control_shape"),
                        "control_rate/control_shape given without control");
    if (!(cfg.control->rate > 0.0)) throw ConfigError(L.of("control_rate"), "control_rate must be > 0");
    if (!(cfg.control->shape > 0.0) || cfg.control->shape == 1.0)
      throw ConfigError(L.of("control_shape"), "control_shape must be > 0 and != 1");
  }
  validate_side(cfg.plus, cfg.alpha, "plus", L);
  if (cfg.minus_given) validate_side(cfg.minus, cfg.alpha, "minus", L);
  return cfg;
}

TSAlphaSpec build_spec(const RunConfig& cfg) {
  const TemperingFunction qp = side_tempering(cfg.plus, cfg.alpha, "plus");
  if (!cfg.minus_given) return TSAlphaSpec(cfg.alpha, cfg.delta_plus, qp, 0.0, qp, cfg.drift_b);
  const TemperingFunction qm = side_tempering(cfg.minus, cfg.alpha, "minus");
  return TSAlphaSpec(cfg.alpha, cfg.delta_plus, qp, cfg.delta_minus, qm, cfg.drift_b);
}

std::string canonical_text(const RunConfig& cfg) {
  std::ostringstream os;
  os << "command = " << to_string(cfg.command) << "\n"
     << "alpha = " << fmt(cfg.alpha) << "\n"
     << "delta_plus = " << fmt(cfg.delta_plus) << "\n"
     << "delta_minus = " << fmt(cfg.delta_minus) << "\n"
     << "drift_b = " << fmt(cfg.drift_b) << "\n";
  if (cfg.n_points > 0 || cfg.x_max > cfg.x_min)
    os << "x_min = " << fmt(cfg.x_min) << "\nx_max = " << fmt(cfg.x_max) << "\n";
  os << "n_points = " << cfg.n_points << "\n"
     << "log_spacing = " << (cfg.log_spacing ? "true" : "false") << "\n"
     << "y = " << fmt(cfg.y) << "\n"
     << "tol = " << fmt(cfg.tol) << "\n";
  if (cfg.control)
    os << "control = " << cfg.control->kind << "\ncontrol_rate = " << fmt(cfg.control->rate)
       << "\ncontrol_shape = " << fmt(cfg.control->shape) << "\n";
  os << "[plus]\n" << side_text(cfg.plus);
  if (cfg.minus_given) os << "[minus]\n" << side_text(cfg.minus);
  return os.str();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace tsa
