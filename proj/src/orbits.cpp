#include "slowobs/orbits.hpp"

#include <cmath>
#include <ostream>

namespace slowobs {

void PeriodicOrbit::write_csv(std::ostream& os) const {
  os << "z";
  for (double v : level) os << ',' << format_double(v);
  os << "\nT_z," << format_double(period) << '\n';
  const std::size_t m = nodes.empty() ? 0 : nodes.front().size();
  for (std::size_t i = 1; i <= m; ++i) os << (i == 1 ? "" : ",") << 'y' << i;
  os << '\n';
  for (const Vec& y : nodes) {
    for (std::size_t i = 0; i < y.size(); ++i)
      os << (i == 0 ? "" : ",") << format_double(y[i]);
    os << '\n';
  }
}

namespace {

struct ReturnInfo {
  double period;
  Vec y_return;
};

// First same-direction return to the section {y : (y - y0).f(y0) = 0}.
ReturnInfo find_return(const ModelSpec& model, const Vec& y0,
                       const OrbitConfig& cfg) {
  const Vec f0 = reduced_field(model, y0);
  const auto event = [&](const Vec& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (y[i] - y0[i]) * f0[i];
    return s;
  };
  const auto rhs = [&](double, const Vec& y) { return reduced_field(model, y); };

  Vec y = y0;
  double tau = 0.0;
  double e_prev = 0.0;  // event(y0) = 0 exactly
  Vec f_prev = f0;
  bool armed = false;   // becomes true once the far side (e < 0) is reached
  while (tau < cfg.tau_max) {
    Vec y_next = rk4_step(rhs, tau, y, cfg.dt);
    for (double v : y_next)
      if (!std::isfinite(v))
        throw IntegrationError("orbit_from_point: flow blew up", tau);
    const double e_next = event(y_next);
    if (e_next < 0.0) armed = true;
    if (armed && e_prev < 0.0 && e_next >= 0.0) {
      const Vec f_next = reduced_field(model, y_next);
      const EventCrossing cross = refine_event_crossing(
          tau, y, f_prev, tau + cfg.dt, y_next, f_next, event, cfg.event_tol);
      // crossing must be in the flow direction at y0
      if (dot(reduced_field(model, cross.y), f0) > 0.0)
        return {cross.t, cross.y};
    }
    y = std::move(y_next);
    f_prev = reduced_field(model, y);
    e_prev = e_next;
    tau += cfg.dt;
  }
  throw NoPeriodicOrbitError("orbit_from_point: no return within tau_max");
}

std::vector<Vec> resample(const ModelSpec& model, const Vec& y0, double period,
                          int n, double dt) {
  const auto rhs = [&](double, const Vec& y) { return reduced_field(model, y); };
  std::vector<Vec> nodes;
  nodes.reserve(static_cast<std::size_t>(n));
  const double seg = period / n;
  const int substeps = std::max(1, static_cast<int>(std::ceil(seg / dt)));
  const double h = seg / substeps;
  Vec y = y0;
  for (int j = 0; j < n; ++j) {
    nodes.push_back(y);
    for (int s = 0; s < substeps; ++s) y = rk4_step(rhs, 0.0, y, h);
  }
  return nodes;
}

double probe_mean(const std::vector<Vec>& nodes, int which) {
  double s = 0.0;
  for (const Vec& y : nodes) {
    switch (which) {
      case 0: s += y[0]; break;
      case 1: s += y[1]; break;
      case 2: s += y[0] * y[1]; break;
      default: s += y[0] * y[0]; break;
    }
  }
  return s / static_cast<double>(nodes.size());
}

}  // namespace

PeriodicOrbit orbit_from_point(const ModelSpec& model, const Vec& y0,
                               const OrbitConfig& cfg) {
  if (norm(reduced_field(model, y0)) <= 1e-8)
    throw DegenerateOrbitError("orbit_from_point: y0 is an equilibrium");

  const ReturnInfo ret = find_return(model, y0, cfg);

  PeriodicOrbit orbit;
  orbit.level = observable(model, y0);
  orbit.period = ret.period;
  orbit.closure_error = dist(ret.y_return, y0);

  int n = cfg.nodes;
  std::vector<Vec> nodes = resample(model, y0, orbit.period, n, cfg.dt);
  if (cfg.auto_refine) {
    while (n < cfg.max_nodes) {
      std::vector<Vec> finer = resample(model, y0, orbit.period, 2 * n, cfg.dt);
      double change = 0.0;
      for (int p = 0; p < 4; ++p)
        change = std::max(change,
                          std::abs(probe_mean(nodes, p) - probe_mean(finer, p)));
      if (change <= cfg.refine_tol) break;
      n *= 2;
      nodes = std::move(finer);
    }
  }
  orbit.nodes = std::move(nodes);
  return orbit;
}

Vec seed_point_for_level(const ModelSpec& model, const Vec& z) {
  if (static_cast<int>(z.size()) != model.k)
    throw std::invalid_argument("seed_point_for_level: level dimension mismatch");
  const double zv = z[0];
  switch (model.kind) {
    case ModelKind::rotation_example1: {
      if (!(zv > 0.0))
        throw DomainError("seed_point_for_level: need z > 0 for rotation_example1");
      return {std::sqrt(zv), 0.0};
    }
    case ModelKind::lotka_volterra_example2: {
      if (!(zv < -2.0))
        throw DomainError("seed_point_for_level: need z < -2 for lotka_volterra_example2");
      // F(1,s) = ln s - s - 1 is strictly decreasing for s > 1.
      const auto Fray = [](double s) { return std::log(s) - s - 1.0; };
      double lo = 1.0, hi = 2.0;
      while (Fray(hi) > zv) {
        hi *= 2.0;
        if (hi > 1e9)
          throw DomainError("seed_point_for_level: level out of reach");
      }
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (Fray(mid) > zv)
          lo = mid;
        else
          hi = mid;
        if (hi - lo < 1e-14) break;
      }
      double s = 0.5 * (lo + hi);
      if (std::abs(Fray(s) - zv) > 1e-10) s = hi;  // fall back to the bracket edge
      return {1.0, s};
    }
  }
  throw Error("unknown model kind");
}

PeriodicOrbit orbit_for_level(const ModelSpec& model, const Vec& z,
                              const OrbitConfig& cfg) {
  PeriodicOrbit orbit = orbit_from_point(model, seed_point_for_level(model, z), cfg);
  orbit.level = z;  // the seed satisfies |F - z| <= 1e-10
  return orbit;
}

double orbit_average(const PeriodicOrbit& orbit,
                     const std::function<double(const Vec&)>& q) {
  if (orbit.nodes.empty())
    throw std::invalid_argument("orbit_average: empty orbit");
  double s = 0.0;
  for (const Vec& y : orbit.nodes) s += q(y);
  return s / static_cast<double>(orbit.nodes.size());
}

}  // namespace slowobs
