#include "hypoflow/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hypoflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double parse_number(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(line) + ": malformed number for key '" + key +
                                "': '" + v + "'");
  }
}

long parse_int(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("line " + std::to_string(line) + ": malformed integer for key '" + key +
                                "': '" + v + "'");
  }
}

void range_check(bool ok, const std::string& key, int line, const std::string& what) {
  if (!ok)
    throw std::invalid_argument("line " + std::to_string(line) + ": key '" + key + "' out of range: " + what);
}

}  // namespace

Potential Config::potential() const {
  Potential p = [&] {
    if (potential_kind == "quadratic") return Potential::quadratic(omega);
    if (potential_kind == "quartic_double_well") return Potential::quartic_double_well(quartic_a, quartic_b);
    if (potential_kind == "polynomial") return Potential::polynomial(coeffs);
    throw std::invalid_argument("unknown potential.kind '" + potential_kind + "'");
  }();
  p.normalize(disc.xmax);
  return p;
}

void Config::validate() const {
  disc.validate();
  if (!(mollifier_sigma > 0)) throw std::invalid_argument("mollifier.sigma must be > 0");
  if (!(emden_tol > 0)) throw std::invalid_argument("emden.tol must be > 0");
  if (!(emden_theta > 0) || emden_theta > 1) throw std::invalid_argument("emden.theta must lie in (0,1]");
  if (!(tol_substep > 0) || !(tol_picard > 0) || !(tol_mass > 0))
    throw std::invalid_argument("tol.* values must be > 0");
  potential();  // kind/params cross-check
}

Config parse_config_text(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string stripped = trim(raw.substr(0, raw.find('#')));
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(origin + " line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string val = trim(stripped.substr(eq + 1));

    if (key == "potential.kind") {
      if (val != "quadratic" && val != "quartic_double_well" && val != "polynomial")
        throw std::invalid_argument("line " + std::to_string(line) + ": unknown potential.kind '" + val + "'");
      cfg.potential_kind = val;
    } else if (key == "potential.omega") {
      cfg.omega = parse_number(val, key, line);
      range_check(cfg.omega > 0, key, line, "must be > 0");
    } else if (key == "potential.a") {
      cfg.quartic_a = parse_number(val, key, line);
      range_check(cfg.quartic_a > 0, key, line, "must be > 0");
    } else if (key == "potential.b") {
      cfg.quartic_b = parse_number(val, key, line);
      range_check(cfg.quartic_b > 0, key, line, "must be > 0");
    } else if (key == "potential.coeffs") {
      cfg.coeffs.clear();
      std::istringstream cs(val);
      std::string tok;
      while (std::getline(cs, tok, ',')) cfg.coeffs.push_back(parse_number(trim(tok), key, line));
    } else if (key == "disc.nx") {
      cfg.disc.nx = static_cast<int>(parse_int(val, key, line));
      range_check(cfg.disc.nx >= 16, key, line, "need nx >= 16");
    } else if (key == "disc.nv") {
      cfg.disc.nv = static_cast<int>(parse_int(val, key, line));
      range_check(cfg.disc.nv >= 8, key, line, "need nv >= 8");
    } else if (key == "disc.xmax") {
      cfg.disc.xmax = parse_number(val, key, line);
      range_check(cfg.disc.xmax > 0, key, line, "must be > 0");
    } else if (key == "disc.gamma") {
      cfg.disc.gamma = parse_number(val, key, line);
      range_check(cfg.disc.gamma > 0, key, line, "must be > 0");
    } else if (key == "mollifier.sigma") {
      cfg.mollifier_sigma = parse_number(val, key, line);
      range_check(cfg.mollifier_sigma > 0, key, line, "must be > 0");
    } else if (key == "emden.tol") {
      cfg.emden_tol = parse_number(val, key, line);
      range_check(cfg.emden_tol > 0, key, line, "must be > 0");
    } else if (key == "emden.theta") {
      cfg.emden_theta = parse_number(val, key, line);
      range_check(cfg.emden_theta > 0 && cfg.emden_theta <= 1, key, line, "must lie in (0,1]");
    } else if (key == "seed") {
      const long s = parse_int(val, key, line);
      range_check(s >= 0, key, line, "must be >= 0");
      cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "tol.substep") {
      cfg.tol_substep = parse_number(val, key, line);
      range_check(cfg.tol_substep > 0, key, line, "must be > 0");
    } else if (key == "tol.picard") {
      cfg.tol_picard = parse_number(val, key, line);
      range_check(cfg.tol_picard > 0, key, line, "must be > 0");
    } else if (key == "tol.mass") {
      cfg.tol_mass = parse_number(val, key, line);
      range_check(cfg.tol_mass > 0, key, line, "must be > 0");
    } else {
      throw std::invalid_argument(origin + " line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string emit_config(const Config& cfg) {
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "potential.kind = " << cfg.potential_kind << "\n";
  os << "potential.omega = " << num(cfg.omega) << "\n";
  os << "potential.a = " << num(cfg.quartic_a) << "\n";
  os << "potential.b = " << num(cfg.quartic_b) << "\n";
  if (!cfg.coeffs.empty()) {
    os << "potential.coeffs = ";
    for (size_t i = 0; i < cfg.coeffs.size(); ++i) os << (i ? "," : "") << num(cfg.coeffs[i]);
    os << "\n";
  }
  os << "disc.nx = " << cfg.disc.nx << "\n";
  os << "disc.nv = " << cfg.disc.nv << "\n";
  os << "disc.xmax = " << num(cfg.disc.xmax) << "\n";
  os << "disc.gamma = " << num(cfg.disc.gamma) << "\n";
  os << "mollifier.sigma = " << num(cfg.mollifier_sigma) << "\n";
  os << "emden.tol = " << num(cfg.emden_tol) << "\n";
  os << "emden.theta = " << num(cfg.emden_theta) << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "tol.substep = " << num(cfg.tol_substep) << "\n";
  os << "tol.picard = " << num(cfg.tol_picard) << "\n";
  os << "tol.mass = " << num(cfg.tol_mass) << "\n";
  return os.str();
}

}  // namespace hypoflow
