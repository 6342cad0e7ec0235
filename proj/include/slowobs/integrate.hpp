#pragma once

#include <functional>
#include <iosfwd>

#include "slowobs/models.hpp"

namespace slowobs {

struct IntegratorConfig {
  double dt = 1e-3;  // base step in fast time
  enum class Method { rk4 } method = Method::rk4;
  double event_refine_tol = 1e-10;
  int record_stride = 1;  // keep every record_stride-th internal step
};

/// Time series of state, control, observable and running discounted cost.
/// controls[i] is the control applied over [times[i], times[i+1]).
struct Trajectory {
  Vec times;
  std::vector<Vec> states;
  std::vector<Vec> controls;
  std::vector<Vec> observables;
  Vec running_cost;
  Vec r_instant;  // cost integrand r(u,y) at each sample

  std::size_t size() const { return times.size(); }
  /// Header: t,y1..ym,u1..udu,z1..zk,cost
  void write_csv(std::ostream& os) const;
};

using ControlFn = std::function<Vec(double tau)>;
using PolicyFn = std::function<Vec(double t, const Vec& y)>;

/// One classic RK4 step of dy/dt = rhs(t, y).
Vec rk4_step(const std::function<Vec(double, const Vec&)>& rhs, double t,
             const Vec& y, double dt);

/// dy/dtau = f(u(tau), y) over [0, t_end]; running_cost is the undiscounted
/// integral of r along the way.
Trajectory integrate_reduced(const ModelSpec& model, const ControlFn& control,
                             const Vec& y0, double t_end,
                             const IntegratorConfig& cfg);
Trajectory integrate_reduced(const ModelSpec& model, const Vec& constant_u,
                             const Vec& y0, double t_end,
                             const IntegratorConfig& cfg);

/// dy/dt = (1/eps) f + g in slow time over [0, t_end]; the internal step is
/// eps*cfg.dt. running_cost accumulates e^{-Ct} r(u,y).
Trajectory integrate_perturbed(const ProblemSpec& problem,
                               const PolicyFn& policy, double t_end,
                               const IntegratorConfig& cfg);

struct DiscountedCost {
  double value = 0.0;
  double tail_bound = 0.0;  // (2/C) M_r e^{-C t_final}
};

DiscountedCost discounted_cost(const Trajectory& traj, double C, double M_r);

struct EventCrossing {
  double t = 0.0;
  Vec y;
};

/// Bisection on the cubic Hermite interpolant between two bracketing samples
/// (states y0, y1 with derivatives f0, f1) until |event| <= tol.
EventCrossing refine_event_crossing(double t0, const Vec& y0, const Vec& f0,
                                    double t1, const Vec& y1, const Vec& f1,
                                    const std::function<double(const Vec&)>& event,
                                    double tol);

}  // namespace slowobs
