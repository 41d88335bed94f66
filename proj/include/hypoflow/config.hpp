#pragma once

#include "hypoflow/potential.hpp"

#include <optional>

namespace hypoflow {

// Key=value run configuration. Unknown keys are rejected with the line number;
// every field has a documented default.
struct Config {
  std::string potential_kind = "quadratic";
  double omega = 1.0;
  double quartic_a = 1.0;
  double quartic_b = 1.0;
  std::vector<double> coeffs;

  Discretization disc;  // nx=256, nv=32, xmax=8, gamma=1

  double mollifier_sigma = 0.3;
  double emden_tol = 1e-10;
  double emden_theta = 0.5;

  std::uint64_t seed = 42;

  double tol_substep = 1e-6;
  double tol_picard = 1e-8;
  double tol_mass = 1e-6;

  Potential potential() const;  // built and offset-normalized on [-xmax, xmax]
  void validate() const;
};

Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text, const std::string& origin = "<text>");

// Deterministic key=value emission; re-parsing reproduces the Config.
std::string emit_config(const Config& cfg);

}  // namespace hypoflow
