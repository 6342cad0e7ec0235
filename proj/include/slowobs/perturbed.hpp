#pragma once

#include <optional>

#include "slowobs/synthesis.hpp"

namespace slowobs {

struct StopRule {
  std::optional<Vec> level;  // observable threshold (k = 1)
  Vec fallback_u;            // applied after the switch (zero if empty)
};

struct EvaluationReport {
  double epsilon = 0.0;
  double cost = 0.0;
  double tail_bound = 0.0;
  Trajectory trajectory;
  double sup_observable_gap = 0.0;  // vs the supplied averaged trajectory
  std::optional<double> switch_time;
  // frozen-schedule diagnostics (zero for closed-loop runs)
  double max_block_drift = 0.0;
  double block_length = 0.0;
  double lipschitz_f = 0.0;
};

/// Continuous feedback u(y, F(y)) with first-crossing switch-off.
EvaluationReport simulate_closed_loop(const ProblemSpec& problem,
                                      const FeedbackPolicy& policy, double T,
                                      const StopRule& stop,
                                      const IntegratorConfig& cfg,
                                      const AveragedTrajectory* reference = nullptr);

/// Piecewise-frozen schedule on blocks of length (eps/2L_f) ln(1/eps): the
/// control is read off a reference reduced trajectory restarted each block.
EvaluationReport simulate_frozen(const ProblemSpec& problem,
                                 const FeedbackPolicy& policy, double T,
                                 const IntegratorConfig& cfg,
                                 const AveragedTrajectory* reference = nullptr);

struct SweepRow {
  double epsilon = 0.0;
  double sup_observable_gap = 0.0;
  double cost_gap = 0.0;  // |cost(eps) - R~|
};

std::vector<SweepRow> averaging_experiment(const ProblemSpec& problem,
                                           const FeedbackPolicy& policy,
                                           const AveragedTrajectory& averaged,
                                           const Vec& eps_list, double T,
                                           const IntegratorConfig& cfg);

/// Max spectral norm of the reduced-field Jacobian over the model state box.
double lipschitz_constant_f(const ModelSpec& model);

}  // namespace slowobs
