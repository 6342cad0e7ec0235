#pragma once

#include "slowobs/config.hpp"
#include "slowobs/perturbed.hpp"

namespace slowobs {

IntegratorConfig integrator_from(const RunConfig& cfg);
OrbitConfig orbit_config_from(const RunConfig& cfg);
ExchangeConfig exchange_config_from(const RunConfig& cfg);

/// Equispaced levels over [z_lo, z_hi], endpoints included.
Vec make_z_grid(const RunConfig& cfg);
Vec make_z_grid(double z_lo, double z_hi, int size);

std::vector<PeriodicOrbit> compute_orbits(const ModelSpec& model, const Vec& z_grid,
                                          const OrbitConfig& cfg);

/// End-to-end artifacts of one configuration: orbits, certificate, tables,
/// averaged run, closed-loop evaluation and the two gaps.
struct PipelineResult {
  Vec z_grid;
  std::vector<PeriodicOrbit> orbits;
  DualSolution dual;
  CertificateDiagnostics diagnostics;
  AcgTables tables;
  AveragedTrajectory averaged;
  EvaluationReport closed_loop;
  double gap_perturbed = 0.0;  // R(eps) - a/C
  double gap_averaged = 0.0;   // R~ - a/C
};

PipelineResult run_pipeline(const RunConfig& cfg);

FeedbackPolicy make_policy(const RunConfig& cfg, const DualSolution& dual);
StopRule stop_rule_from(const ProblemSpec& problem);

/// record stride giving roughly 0.01 slow-time resolution in trajectory CSVs
int default_record_stride(double epsilon, double dt);

}  // namespace slowobs
