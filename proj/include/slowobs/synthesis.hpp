#pragma once

#include "slowobs/lp.hpp"
#include "slowobs/measures.hpp"

namespace slowobs {

/// Feedback u(y,z) = argmin_u { r + zeta' h + grad(eta_z) . f }, clamped to
/// the control box. eta is taken from the nearest z-grid node; the builtin
/// models resolve the argmin in closed form.
struct FeedbackPolicy {
  ModelSpec model;
  DualSolution dual;
  int control_grid = 33;
};

Vec feedback_u(const FeedbackPolicy& policy, const Vec& y, const Vec& z);

/// h~*(z), r~*(z) and T_z tabulated over the z-grid (k = 1).
struct AcgTables {
  Vec z_grid;
  Vec h_star;
  Vec r_star;
  Vec periods;

  void write_csv(std::ostream& os) const;
  double interp_h(double z) const;
  double interp_r(double z) const;
};

AcgTables tabulate_acg(const ModelSpec& model, const FeedbackPolicy& policy,
                       const Vec& z_grid, const std::vector<PeriodicOrbit>& orbits);

struct HorizonPolicy {
  double dt = 0.01;       // slow-time step
  double tail_tol = 1e-4; // stop once e^{-Ct} max|r*| falls below this
  double t_max = 1e4;
};

struct AveragedTrajectory {
  Vec times;
  Vec z;
  Vec r_inst;
  Vec cost;
  double R_tilde = 0.0;
  double tail_bound = 0.0;
  bool saturated = false;

  void write_csv(std::ostream& os) const;
  double z_at(double t) const;     // linear interpolation, clamped ends
  double cost_at(double t) const;
};

AveragedTrajectory integrate_averaged(const AcgTables& tables, double z0,
                                      double discount, const HorizonPolicy& horizon);

/// R~ - a_{M,N}/C, the near-optimality estimate.
double optimality_gap(double R_tilde, double a_MN, double C);

}  // namespace slowobs
