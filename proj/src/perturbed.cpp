#include "slowobs/perturbed.hpp"

#include <cmath>

namespace slowobs {

namespace {

struct Recorder {
  Trajectory traj;
  int stride = 1;
  long count = 0;

  void force_push(const ModelSpec& model, double t, const Vec& y, const Vec& u,
                  double cost) {
    const Fields fl = eval_fields(model, u, y);
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.controls.push_back(u);
    traj.observables.push_back(fl.F);
    traj.running_cost.push_back(cost);
    traj.r_instant.push_back(fl.r);
  }
  void push(const ModelSpec& model, double t, const Vec& y, const Vec& u,
            double cost) {
    if (++count % stride == 0) force_push(model, t, y, u, cost);
  }
};

bool admissible(const ModelSpec& model, const Vec& y) {
  for (double v : y)
    if (!std::isfinite(v)) return false;
  if (model.kind == ModelKind::lotka_volterra_example2)
    return y[0] > 0.0 && y[1] > 0.0;
  return true;
}

double tail_bound_from(const Trajectory& traj, double C) {
  // M_r taken as the max integrand over the last tenth of the run.
  if (traj.size() == 0) return 0.0;
  double m = 0.0;
  const std::size_t start = traj.size() - std::max<std::size_t>(1, traj.size() / 10);
  for (std::size_t i = start; i < traj.size(); ++i)
    m = std::max(m, std::abs(traj.r_instant[i]));
  return 2.0 / C * m * std::exp(-C * traj.times.back());
}

}  // namespace

EvaluationReport simulate_closed_loop(const ProblemSpec& problem,
                                      const FeedbackPolicy& policy, double T,
                                      const StopRule& stop,
                                      const IntegratorConfig& cfg,
                                      const AveragedTrajectory* reference) {
  const ModelSpec& model = problem.model;
  const double eps = problem.epsilon;
  const double C = problem.discount;
  const double h_slow = eps * cfg.dt;

  EvaluationReport rep;
  rep.epsilon = eps;
  Vec fallback = stop.fallback_u.empty() ? Vec(static_cast<std::size_t>(model.du), 0.0)
                                         : stop.fallback_u;

  Recorder rec;
  rec.stride = std::max(1, cfg.record_stride);
  Vec y = problem.y0;
  double t = 0.0, cost = 0.0;
  bool switched = false;

  const auto control_at = [&](const Vec& yy) {
    if (switched) return fallback;
    const Vec u = feedback_u(policy, yy, observable(model, yy));
    if (!model.control_in_box(u))
      throw std::invalid_argument("simulate_closed_loop: policy control outside box");
    return u;
  };
  const auto track_gap = [&](double tt, const Vec& yy) {
    if (!reference) return;
    const double gap = std::abs(observable(model, yy)[0] - reference->z_at(tt));
    rep.sup_observable_gap = std::max(rep.sup_observable_gap, gap);
  };

  rec.force_push(model, t, y, control_at(y), cost);
  track_gap(t, y);

  while (t < T - 1e-12) {
    const double h = std::min(h_slow, T - t);
    const Vec u = control_at(y);
    const auto rhs = [&](double, const Vec& yy) {
      const Fields fl = eval_fields(model, u, yy);
      Vec d(yy.size());
      for (std::size_t i = 0; i < yy.size(); ++i) d[i] = fl.f[i] / eps + fl.g[i];
      return d;
    };
    const double F_prev = observable(model, y)[0];
    const double r_prev = eval_fields(model, u, y).r;
    Vec y_next = rk4_step(rhs, t, y, h);
    if (!admissible(model, y_next))
      throw IntegrationError("simulate_closed_loop: state left model domain", t);
    const double F_next = observable(model, y_next)[0];

    if (!switched && stop.level) {
      const double L = (*stop.level)[0];
      if ((F_prev - L) * (F_next - L) < 0.0 || F_next == L) {
        // linear interpolation of the crossing, then a partial step to it
        const double theta =
            F_next == F_prev ? 1.0 : (L - F_prev) / (F_next - F_prev);
        const double h_part = std::min(std::max(theta, 0.0), 1.0) * h;
        Vec y_cross = y;
        if (h_part > 0.0) {
          y_cross = rk4_step(rhs, t, y, h_part);
          const double r_cross = eval_fields(model, u, y_cross).r;
          cost += 0.5 * h_part *
                  (std::exp(-C * t) * r_prev +
                   std::exp(-C * (t + h_part)) * r_cross);
        }
        t += h_part;
        y = std::move(y_cross);
        switched = true;
        rep.switch_time = t;
        track_gap(t, y);
        rec.force_push(model, t, y, fallback, cost);
        continue;
      }
    }

    const double r_next = eval_fields(model, u, y_next).r;
    cost += 0.5 * h * (std::exp(-C * t) * r_prev + std::exp(-C * (t + h)) * r_next);
    y = std::move(y_next);
    t += h;
    track_gap(t, y);
    if (t >= T - 1e-12)
      rec.force_push(model, t, y, u, cost);
    else
      rec.push(model, t, y, u, cost);
  }

  rep.cost = cost;
  rep.trajectory = std::move(rec.traj);
  rep.tail_bound = tail_bound_from(rep.trajectory, C);
  return rep;
}

EvaluationReport simulate_frozen(const ProblemSpec& problem,
                                 const FeedbackPolicy& policy, double T,
                                 const IntegratorConfig& cfg,
                                 const AveragedTrajectory* reference) {
  const ModelSpec& model = problem.model;
  const double eps = problem.epsilon;
  const double C = problem.discount;
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("simulate_frozen: need 0 < eps < 1");

  const double L_f = lipschitz_constant_f(model);
  const double delta = eps / (2.0 * L_f) * std::log(1.0 / eps);
  const int per_block = std::max(1, static_cast<int>(std::ceil(delta / (eps * cfg.dt))));
  const double h_slow = delta / per_block;

  EvaluationReport rep;
  rep.epsilon = eps;
  rep.block_length = delta;
  rep.lipschitz_f = L_f;
  Vec fallback(static_cast<std::size_t>(model.du), 0.0);
  const std::optional<Vec>& stop_level = problem.stop_level;

  Recorder rec;
  rec.stride = std::max(1, cfg.record_stride);
  Vec y = problem.y0;
  double t = 0.0, cost = 0.0;
  bool switched = false;

  const auto track_gap = [&](double tt, const Vec& yy) {
    if (!reference) return;
    const double gap = std::abs(observable(model, yy)[0] - reference->z_at(tt));
    rep.sup_observable_gap = std::max(rep.sup_observable_gap, gap);
  };

  rec.force_push(model, t, y, switched ? fallback : feedback_u(policy, y, observable(model, y)), cost);

  while (t < T - 1e-12) {
    // freeze the observable and restart the reference reduced trajectory
    const Vec z_l = observable(model, y);
    Vec y_ref = y;
    double block_drift = 0.0;
    for (int s = 0; s < per_block && t < T - 1e-12; ++s) {
      const double h = std::min(h_slow, T - t);
      const Vec u = switched ? fallback : feedback_u(policy, y_ref, z_l);
      const auto rhs = [&](double, const Vec& yy) {
        const Fields fl = eval_fields(model, u, yy);
        Vec d(yy.size());
        for (std::size_t i = 0; i < yy.size(); ++i) d[i] = fl.f[i] / eps + fl.g[i];
        return d;
      };
      const double F_prev = observable(model, y)[0];
      const double r_prev = eval_fields(model, u, y).r;
      Vec y_next = rk4_step(rhs, t, y, h);
      if (!admissible(model, y_next))
        throw IntegrationError("simulate_frozen: state left model domain", t);
      const double F_next = observable(model, y_next)[0];

      if (!switched && stop_level) {
        const double L = (*stop_level)[0];
        if ((F_prev - L) * (F_next - L) < 0.0 || F_next == L) {
          const double theta =
              F_next == F_prev ? 1.0 : (L - F_prev) / (F_next - F_prev);
          const double h_part = std::min(std::max(theta, 0.0), 1.0) * h;
          if (h_part > 0.0) {
            Vec y_cross = rk4_step(rhs, t, y, h_part);
            const double r_cross = eval_fields(model, u, y_cross).r;
            cost += 0.5 * h_part *
                    (std::exp(-C * t) * r_prev +
                     std::exp(-C * (t + h_part)) * r_cross);
            y = std::move(y_cross);
          }
          t += h_part;
          switched = true;
          rep.switch_time = t;
          track_gap(t, y);
          rec.force_push(model, t, y, fallback, cost);
          break;  // block restarts from the crossing state
        }
      }

      const double r_next = eval_fields(model, u, y_next).r;
      cost += 0.5 * h * (std::exp(-C * t) * r_prev + std::exp(-C * (t + h)) * r_next);
      y = std::move(y_next);
      t += h;
      const auto reduced_rhs = [&](double, const Vec& yy) {
        return reduced_field(model, yy);
      };
      y_ref = rk4_step(reduced_rhs, 0.0, y_ref, h / eps);
      block_drift = std::max(block_drift, dist(y, y_ref));
      track_gap(t, y);
      if (t >= T - 1e-12)
        rec.force_push(model, t, y, u, cost);
      else
        rec.push(model, t, y, u, cost);
    }
    rep.max_block_drift = std::max(rep.max_block_drift, block_drift);
  }

  rep.cost = cost;
  rep.trajectory = std::move(rec.traj);
  rep.tail_bound = tail_bound_from(rep.trajectory, C);
  return rep;
}

std::vector<SweepRow> averaging_experiment(const ProblemSpec& problem,
                                           const FeedbackPolicy& policy,
                                           const AveragedTrajectory& averaged,
                                           const Vec& eps_list, double T,
                                           const IntegratorConfig& cfg) {
  if (eps_list.empty())
    throw std::invalid_argument("averaging_experiment: empty eps list");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("averaging_experiment: eps list must descend");

  StopRule stop;
  stop.level = problem.stop_level;
  std::vector<SweepRow> rows;
  for (double eps : eps_list) {
    ProblemSpec p = problem;
    p.epsilon = eps;
    const EvaluationReport rep =
        simulate_closed_loop(p, policy, T, stop, cfg, &averaged);
    rows.push_back(SweepRow{eps, rep.sup_observable_gap,
                            std::abs(rep.cost - averaged.R_tilde)});
  }
  return rows;
}

double lipschitz_constant_f(const ModelSpec& model) {
  const int n = 101;
  double worst = 0.0;
  Vec y(2);
  for (int i = 0; i < n; ++i) {
    y[0] = model.state_lo[0] + (model.state_hi[0] - model.state_lo[0]) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      y[1] =
          model.state_lo[1] + (model.state_hi[1] - model.state_lo[1]) * j / (n - 1);
      const Vec J = reduced_field_jacobian(model, y);
      // spectral norm of a 2x2 block
      const double tr = J[0] * J[0] + J[1] * J[1] + J[2] * J[2] + J[3] * J[3];
      const double det = J[0] * J[3] - J[1] * J[2];
      const double disc = std::max(0.0, tr * tr - 4.0 * det * det);
      worst = std::max(worst, std::sqrt(0.5 * (tr + std::sqrt(disc))));
    }
  }
  return worst;
}

}  // namespace slowobs
