#pragma once

#include <iosfwd>

#include "slowobs/orbits.hpp"

namespace slowobs {

struct Atom {
  double weight = 0.0;
  Vec u;
  Vec y;
};

/// Finite weighted atom set over control x state, supported on U x Y_z.
struct OccupationalMeasure {
  std::vector<Atom> atoms;
  Vec level;

  void write_csv(std::ostream& os) const;
};

using StatePolicy = std::function<Vec(const Vec& y, const Vec& z)>;

/// Atoms (1/n, policy(y_j, z), y_j) over the orbit nodes.
OccupationalMeasure occupational_from_policy(const ModelSpec& model,
                                             const PeriodicOrbit& orbit,
                                             const StatePolicy& policy);

struct MeanFunctionals {
  Vec h_bar;  // k
  double r_bar = 0.0;
};

MeanFunctionals mean_functionals(const ModelSpec& model,
                                 const OccupationalMeasure& mu);

}  // namespace slowobs
