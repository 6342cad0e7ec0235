#include "slowobs/pipeline.hpp"

#include <cmath>

namespace slowobs {

IntegratorConfig integrator_from(const RunConfig& cfg) {
  IntegratorConfig ic;
  ic.dt = cfg.dt;
  ic.event_refine_tol = cfg.event_tol;
  return ic;
}

OrbitConfig orbit_config_from(const RunConfig& cfg) {
  OrbitConfig oc;
  oc.nodes = cfg.orbit_nodes;
  oc.dt = cfg.dt;
  oc.event_tol = cfg.event_tol;
  return oc;
}

ExchangeConfig exchange_config_from(const RunConfig& cfg) {
  ExchangeConfig ec;
  ec.tol = cfg.exchange_tol;
  ec.max_iterations = cfg.exchange_max_iterations;
  ec.control_grid = cfg.control_grid_size;
  return ec;
}

Vec make_z_grid(double z_lo, double z_hi, int size) {
  return linspace(z_lo, z_hi, size);
}

Vec make_z_grid(const RunConfig& cfg) {
  return make_z_grid(cfg.z_lo, cfg.z_hi, cfg.z_grid_size);
}

std::vector<PeriodicOrbit> compute_orbits(const ModelSpec& model, const Vec& z_grid,
                                          const OrbitConfig& cfg) {
  std::vector<PeriodicOrbit> orbits;
  orbits.reserve(z_grid.size());
  for (double z : z_grid) orbits.push_back(orbit_for_level(model, Vec{z}, cfg));
  return orbits;
}

FeedbackPolicy make_policy(const RunConfig& cfg, const DualSolution& dual) {
  FeedbackPolicy p;
  p.model = ModelSpec::builtin(cfg.model);
  p.dual = dual;
  p.control_grid = cfg.control_grid_size;
  return p;
}

StopRule stop_rule_from(const ProblemSpec& problem) {
  StopRule stop;
  stop.level = problem.stop_level;
  return stop;
}

int default_record_stride(double epsilon, double dt) {
  return std::max(1, static_cast<int>(std::lround(0.01 / (epsilon * dt))));
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  const ProblemSpec problem = cfg.problem();
  PipelineResult out;
  out.z_grid = make_z_grid(cfg);
  out.orbits = compute_orbits(problem.model, out.z_grid, orbit_config_from(cfg));

  const MonomialBasisZ basis_z(cfg.basis_n);
  const MonomialBasisY basis_y = MonomialBasisY::up_to_degree(cfg.basis_degree);
  out.dual = solve_dual_exchange(problem, basis_z, basis_y, out.z_grid, out.orbits,
                                 exchange_config_from(cfg));
  out.diagnostics = certificate_diagnostics(out.dual);

  const FeedbackPolicy policy = make_policy(cfg, out.dual);
  out.tables = tabulate_acg(problem.model, policy, out.z_grid, out.orbits);
  out.averaged =
      integrate_averaged(out.tables, problem.z0[0], problem.discount, HorizonPolicy{});

  IntegratorConfig ic = integrator_from(cfg);
  ic.record_stride = default_record_stride(problem.epsilon, cfg.dt);
  out.closed_loop = simulate_closed_loop(problem, policy, cfg.horizon,
                                         stop_rule_from(problem), ic, &out.averaged);

  out.gap_perturbed =
      optimality_gap(out.closed_loop.cost, out.dual.value, problem.discount);
  out.gap_averaged =
      optimality_gap(out.averaged.R_tilde, out.dual.value, problem.discount);
  return out;
}

}  // namespace slowobs
