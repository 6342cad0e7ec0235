#pragma once

#include <string>

#include "slowobs/models.hpp"

namespace slowobs {

struct ConfigError : Error {
  using Error::Error;
};

struct RunConfig {
  int schema_version = 1;
  ModelKind model = ModelKind::lotka_volterra_example2;
  double epsilon = 0.1;
  double discount = 0.1;
  Vec y0;
  double z_lo = 0.0, z_hi = 0.0;
  std::optional<double> z0;  // validated against F(y0) when present
  std::optional<double> stop_level;

  int basis_n = 10;
  int basis_degree = 5;
  int z_grid_size = 20;
  int control_grid_size = 33;
  int orbit_nodes = 256;
  double dt = 1e-3;
  double event_tol = 1e-10;
  double exchange_tol = 1e-6;
  int exchange_max_iterations = 500;
  double horizon = 80.0;
  Vec sweep_eps = {0.2, 0.1, 0.05, 0.025};
  double sweep_horizon = 40.0;
  unsigned seed = 7;
  std::string out_dir = "out";

  ProblemSpec problem() const;  // builds and validates
  void validate() const;

  static RunConfig example2_defaults();
  static RunConfig example1_defaults();
};

/// Flat JSON with a schema_version field; unknown keys are rejected.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& origin);

}  // namespace slowobs
