#pragma once

#include <iosfwd>

#include "slowobs/integrate.hpp"

namespace slowobs {

struct OrbitConfig {
  int nodes = 256;        // equal-time samples along the orbit
  double dt = 1e-3;       // integration step in fast time
  double event_tol = 1e-10;
  double tau_max = 200.0;  // give up if no return by then
  bool auto_refine = true;  // double nodes until probe averages settle
  int max_nodes = 4096;
  double refine_tol = 1e-5;
};

struct NoPeriodicOrbitError : Error {
  using Error::Error;
};
struct DegenerateOrbitError : Error {
  using Error::Error;
};

/// A closed orbit of the autonomous reduced flow on the level set Y_z,
/// sampled at n equally spaced times; doubles as the invariant measure nu_z.
struct PeriodicOrbit {
  Vec level;  // k
  double period = 0.0;
  std::vector<Vec> nodes;
  double closure_error = 0.0;

  /// Lines "z,..." and "T_z,...", then a node table.
  void write_csv(std::ostream& os) const;
};

PeriodicOrbit orbit_from_point(const ModelSpec& model, const Vec& y0,
                               const OrbitConfig& cfg);

/// A point on Y_z found by root-finding along a fixed model-specific ray.
Vec seed_point_for_level(const ModelSpec& model, const Vec& z);

PeriodicOrbit orbit_for_level(const ModelSpec& model, const Vec& z,
                              const OrbitConfig& cfg);

double orbit_average(const PeriodicOrbit& orbit,
                     const std::function<double(const Vec&)>& q);

}  // namespace slowobs
