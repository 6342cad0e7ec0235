#include "slowobs/integrate.hpp"

#include <cmath>
#include <ostream>

namespace slowobs {

void Trajectory::write_csv(std::ostream& os) const {
  const std::size_t m = states.empty() ? 0 : states.front().size();
  const std::size_t du = controls.empty() ? 0 : controls.front().size();
  const std::size_t k = observables.empty() ? 0 : observables.front().size();
  os << "t";
  for (std::size_t i = 1; i <= m; ++i) os << ",y" << i;
  for (std::size_t i = 1; i <= du; ++i) os << ",u" << i;
  for (std::size_t i = 1; i <= k; ++i) os << ",z" << i;
  os << ",cost\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    os << format_double(times[i]);
    for (double v : states[i]) os << ',' << format_double(v);
    for (double v : controls[i]) os << ',' << format_double(v);
    for (double v : observables[i]) os << ',' << format_double(v);
    os << ',' << format_double(running_cost[i]) << '\n';
  }
}

Vec rk4_step(const std::function<Vec(double, const Vec&)>& rhs, double t,
             const Vec& y, double dt) {
  const std::size_t n = y.size();
  const Vec k1 = rhs(t, y);
  Vec tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
  const Vec k2 = rhs(t + 0.5 * dt, tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
  const Vec k3 = rhs(t + 0.5 * dt, tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
  const Vec k4 = rhs(t + dt, tmp);
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

namespace {

bool state_admissible(const ModelSpec& model, const Vec& y) {
  for (double v : y)
    if (!std::isfinite(v)) return false;
  if (model.kind == ModelKind::lotka_volterra_example2)
    return y[0] > 0.0 && y[1] > 0.0;
  return true;
}

struct Recorder {
  Trajectory traj;
  int stride = 1;
  long step = 0;

  void push(const ModelSpec& model, double t, const Vec& y, const Vec& u,
            double cost) {
    const Fields fl = eval_fields(model, u, y);
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.controls.push_back(u);
    traj.observables.push_back(fl.F);
    traj.running_cost.push_back(cost);
    traj.r_instant.push_back(fl.r);
  }
};

}  // namespace

Trajectory integrate_reduced(const ModelSpec& model, const ControlFn& control,
                             const Vec& y0, double t_end,
                             const IntegratorConfig& cfg) {
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate_reduced: t_end <= 0");
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("integrate_reduced: dt <= 0");
  if (!state_admissible(model, y0))
    throw DomainError("integrate_reduced: y0 outside model domain");

  Recorder rec;
  rec.stride = std::max(1, cfg.record_stride);
  Vec y = y0;
  double tau = 0.0, cost = 0.0;
  Vec u = control(0.0);
  rec.push(model, tau, y, u, cost);

  const long nsteps = static_cast<long>(std::ceil(t_end / cfg.dt - 1e-12));
  for (long s = 0; s < nsteps; ++s) {
    const double h = std::min(cfg.dt, t_end - tau);
    u = control(tau);
    const auto rhs = [&](double, const Vec& yy) {
      return eval_fields(model, u, yy).f;
    };
    const double r_before = eval_fields(model, u, y).r;
    Vec y_next = rk4_step(rhs, tau, y, h);
    if (!state_admissible(model, y_next))
      throw IntegrationError("integrate_reduced: state left model domain", tau);
    const double r_after = eval_fields(model, u, y_next).r;
    cost += 0.5 * h * (r_before + r_after);
    y = std::move(y_next);
    tau += h;
    if ((s + 1) % rec.stride == 0 || s + 1 == nsteps)
      rec.push(model, tau, y, u, cost);
  }
  return std::move(rec.traj);
}

Trajectory integrate_reduced(const ModelSpec& model, const Vec& constant_u,
                             const Vec& y0, double t_end,
                             const IntegratorConfig& cfg) {
  return integrate_reduced(
      model, [&](double) { return constant_u; }, y0, t_end, cfg);
}

Trajectory integrate_perturbed(const ProblemSpec& problem,
                               const PolicyFn& policy, double t_end,
                               const IntegratorConfig& cfg) {
  const ModelSpec& model = problem.model;
  const double eps = problem.epsilon;
  const double C = problem.discount;
  if (!(t_end > 0.0))
    throw std::invalid_argument("integrate_perturbed: t_end <= 0");
  if (!state_admissible(model, problem.y0))
    throw DomainError("integrate_perturbed: y0 outside model domain");

  Recorder rec;
  rec.stride = std::max(1, cfg.record_stride);
  Vec y = problem.y0;
  double t = 0.0, cost = 0.0;
  Vec u = policy(0.0, y);
  rec.push(model, t, y, u, cost);

  const double h_slow = eps * cfg.dt;  // stability: step scaled by eps
  const long nsteps = static_cast<long>(std::ceil(t_end / h_slow - 1e-12));
  for (long s = 0; s < nsteps; ++s) {
    const double h = std::min(h_slow, t_end - t);
    u = policy(t, y);
    if (!model.control_in_box(u))
      throw std::invalid_argument("integrate_perturbed: policy control outside box");
    const auto rhs = [&](double, const Vec& yy) {
      const Fields fl = eval_fields(model, u, yy);
      Vec d(yy.size());
      for (std::size_t i = 0; i < yy.size(); ++i)
        d[i] = fl.f[i] / eps + fl.g[i];
      return d;
    };
    const double r_before = eval_fields(model, u, y).r;
    Vec y_next = rk4_step(rhs, t, y, h);
    if (!state_admissible(model, y_next))
      throw IntegrationError("integrate_perturbed: state left model domain or blew up", t);
    const double r_after = eval_fields(model, u, y_next).r;
    cost += 0.5 * h *
            (std::exp(-C * t) * r_before + std::exp(-C * (t + h)) * r_after);
    y = std::move(y_next);
    t += h;
    if ((s + 1) % rec.stride == 0 || s + 1 == nsteps)
      rec.push(model, t, y, u, cost);
  }
  return std::move(rec.traj);
}

DiscountedCost discounted_cost(const Trajectory& traj, double C, double M_r) {
  if (traj.size() == 0)
    throw std::invalid_argument("discounted_cost: empty trajectory");
  if (!(C > 0.0)) throw std::invalid_argument("discounted_cost: C <= 0");
  DiscountedCost out;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double a = std::exp(-C * traj.times[i]) * traj.r_instant[i];
    const double b = std::exp(-C * traj.times[i + 1]) * traj.r_instant[i + 1];
    out.value += 0.5 * (traj.times[i + 1] - traj.times[i]) * (a + b);
  }
  out.tail_bound = 2.0 / C * M_r * std::exp(-C * traj.times.back());
  return out;
}

EventCrossing refine_event_crossing(double t0, const Vec& y0, const Vec& f0,
                                    double t1, const Vec& y1, const Vec& f1,
                                    const std::function<double(const Vec&)>& event,
                                    double tol) {
  const double g0 = event(y0);
  const double g1 = event(y1);
  if (g0 == 0.0) return {t0, y0};
  if (g1 == 0.0) return {t1, y1};
  if ((g0 > 0.0) == (g1 > 0.0))
    throw std::invalid_argument("refine_event_crossing: no sign change in bracket");

  const double h = t1 - t0;
  const std::size_t n = y0.size();
  const auto hermite = [&](double s) {
    // cubic Hermite basis on [0,1]
    const double s2 = s * s, s3 = s2 * s;
    const double b0 = 2 * s3 - 3 * s2 + 1, b1 = s3 - 2 * s2 + s;
    const double b2 = -2 * s3 + 3 * s2, b3 = s3 - s2;
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i)
      y[i] = b0 * y0[i] + b1 * h * f0[i] + b2 * y1[i] + b3 * h * f1[i];
    return y;
  };

  double lo = 0.0, hi = 1.0, glo = g0;
  Vec y_mid;
  double g_mid = g0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    y_mid = hermite(mid);
    g_mid = event(y_mid);
    if (std::abs(g_mid) <= tol || hi - lo < 1e-15) {
      return {t0 + mid * h, y_mid};
    }
    if ((g_mid > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = g_mid;
    } else {
      hi = mid;
    }
  }
  return {t0 + 0.5 * (lo + hi) * h, y_mid};
}

}  // namespace slowobs
