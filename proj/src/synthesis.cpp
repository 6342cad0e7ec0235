#include "slowobs/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace slowobs {

namespace {

double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Vec feedback_u(const FeedbackPolicy& policy, const Vec& y, const Vec& z) {
  const ModelSpec& model = policy.model;
  const DualSolution& dual = policy.dual;
  const double z_eff =
      std::min(std::max(z[0], dual.z_grid.front()), dual.z_grid.back());
  const double zeta_d = dual.zeta_deriv(z_eff);
  const ControlAffine ca = control_affine_at(model, y);
  const double lo = model.u_lo[0], hi = model.u_hi[0];

  if (ca.f_control_independent && ca.r2 > 0.0) {
    // grad(eta).f does not depend on u, so the argmin is the clamped vertex
    // of the quadratic r2 u^2 + (r1 + zeta' h1) u.
    const double B = ca.r1 + zeta_d * ca.h1[0];
    return {argmin_box_quadratic(ca.r2, B, lo, hi)};
  }

  const Vec& omega = dual.omega[static_cast<std::size_t>(dual.nearest_grid_index(z_eff))];
  const auto objective = [&](double u) {
    const Fields fl = eval_fields(model, Vec{u}, y);
    double eta_term = 0.0;
    for (int j = 0; j < dual.basis_y.count(); ++j)
      eta_term += omega[static_cast<std::size_t>(j)] *
                  dot(dual.basis_y.grad(j, y), fl.f);
    return fl.r + zeta_d * fl.h[0] + eta_term;
  };

  const int n = std::max(2, policy.control_grid);
  int best = 0;
  double best_v = kInf;
  for (int i = 0; i < n; ++i) {
    const double u = lo + (hi - lo) * i / (n - 1);
    const double v = objective(u);
    const double bu = lo + (hi - lo) * best / (n - 1);
    if (v < best_v - 1e-15 ||
        (std::abs(v - best_v) <= 1e-15 && std::abs(u) < std::abs(bu))) {
      best_v = v;
      best = i;
    }
  }
  const double cell = (hi - lo) / (n - 1);
  const double u0 = lo + cell * best;
  const double a = std::max(lo, u0 - cell), b = std::min(hi, u0 + cell);
  const double u_ref = golden_min(objective, a, b);
  return {objective(u_ref) < best_v ? u_ref : u0};
}

void AcgTables::write_csv(std::ostream& os) const {
  os << "z,T_z,h_star,r_star\n";
  for (std::size_t i = 0; i < z_grid.size(); ++i)
    os << format_double(z_grid[i]) << ',' << format_double(periods[i]) << ','
       << format_double(h_star[i]) << ',' << format_double(r_star[i]) << '\n';
}

namespace {

double interp_table(const Vec& xs, const Vec& ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return (1.0 - w) * ys[i - 1] + w * ys[i];
}

}  // namespace

double AcgTables::interp_h(double z) const { return interp_table(z_grid, h_star, z); }
double AcgTables::interp_r(double z) const { return interp_table(z_grid, r_star, z); }

AcgTables tabulate_acg(const ModelSpec& model, const FeedbackPolicy& policy,
                       const Vec& z_grid, const std::vector<PeriodicOrbit>& orbits) {
  if (orbits.size() != z_grid.size())
    throw std::invalid_argument("tabulate_acg: one orbit per grid node required");
  AcgTables tables;
  tables.z_grid = z_grid;
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    const PeriodicOrbit& orbit = orbits[i];
    const OccupationalMeasure mu = occupational_from_policy(
        model, orbit,
        [&](const Vec& y, const Vec& z) { return feedback_u(policy, y, z); });
    const MeanFunctionals mf = mean_functionals(model, mu);
    tables.h_star.push_back(mf.h_bar[0]);
    tables.r_star.push_back(mf.r_bar);
    tables.periods.push_back(orbit.period);
  }
  return tables;
}

void AveragedTrajectory::write_csv(std::ostream& os) const {
  os << "t,z,r_star,cost\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    os << format_double(times[i]) << ',' << format_double(z[i]) << ','
       << format_double(r_inst[i]) << ',' << format_double(cost[i]) << '\n';
}

double AveragedTrajectory::z_at(double t) const { return interp_table(times, z, t); }
double AveragedTrajectory::cost_at(double t) const {
  return interp_table(times, cost, t);
}

AveragedTrajectory integrate_averaged(const AcgTables& tables, double z0,
                                      double discount, const HorizonPolicy& horizon) {
  const double z_min = tables.z_grid.front(), z_max = tables.z_grid.back();
  double max_r = 0.0;
  for (double r : tables.r_star) max_r = std::max(max_r, std::abs(r));

  AveragedTrajectory out;
  double zv = std::min(std::max(z0, z_min), z_max);
  double t = 0.0, cost = 0.0;

  const auto drift = [&](double zz) {
    const double zc = std::min(std::max(zz, z_min), z_max);
    double h = tables.interp_h(zc);
    if ((zc >= z_max && h > 0.0) || (zc <= z_min && h < 0.0)) h = 0.0;
    return h;
  };
  const auto push = [&]() {
    out.times.push_back(t);
    out.z.push_back(zv);
    out.r_inst.push_back(tables.interp_r(zv));
    out.cost.push_back(cost);
  };
  push();

  while (t < horizon.t_max && std::exp(-discount * t) * max_r > horizon.tail_tol) {
    const double h = horizon.dt;
    const double r0 = tables.interp_r(zv);
    // scalar RK4 on z' = h*(z)
    const double k1 = drift(zv);
    const double k2 = drift(zv + 0.5 * h * k1);
    const double k3 = drift(zv + 0.5 * h * k2);
    const double k4 = drift(zv + h * k3);
    double z_next = zv + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (z_next > z_max) {
      z_next = z_max;
      out.saturated = true;
    } else if (z_next < z_min) {
      z_next = z_min;
      out.saturated = true;
    }
    const double r1 = tables.interp_r(z_next);
    cost += 0.5 * h *
            (std::exp(-discount * t) * r0 + std::exp(-discount * (t + h)) * r1);
    zv = z_next;
    t += h;
    push();
  }
  out.R_tilde = cost;
  out.tail_bound = 2.0 / discount * max_r * std::exp(-discount * t);
  return out;
}

double optimality_gap(double R_tilde, double a_MN, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("optimality_gap: C <= 0");
  return R_tilde - a_MN / C;
}

}  // namespace slowobs
