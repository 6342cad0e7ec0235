#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "simplex_engine.hpp"

namespace slowobs {

double MonomialBasisZ::eval(int i, double z) const {
  return std::pow(z, i + 1);
}

double MonomialBasisZ::deriv(int i, double z) const {
  return (i + 1) * std::pow(z, i);
}

MonomialBasisY MonomialBasisY::up_to_degree(int degree) {
  // Each exponent runs up to `degree`, the constant is excluded; degree 5
  // gives the 35-dimensional space used throughout.
  MonomialBasisY b;
  for (int total = 1; total <= 2 * degree; ++total)
    for (int i1 = std::min(total, degree); i1 >= 0 && total - i1 <= degree; --i1)
      b.exps.push_back({i1, total - i1});
  return b;
}

double MonomialBasisY::eval(int j, const Vec& y) const {
  const Exponents& e = exps[static_cast<std::size_t>(j)];
  return std::pow(y[0], e.i1) * std::pow(y[1], e.i2);
}

Vec MonomialBasisY::grad(int j, const Vec& y) const {
  const Exponents& e = exps[static_cast<std::size_t>(j)];
  const double p1 = e.i1 > 0 ? e.i1 * std::pow(y[0], e.i1 - 1) * std::pow(y[1], e.i2) : 0.0;
  const double p2 = e.i2 > 0 ? e.i2 * std::pow(y[1], e.i2 - 1) * std::pow(y[0], e.i1) : 0.0;
  return {p1, p2};
}

ConstraintRow constraint_row(const ModelSpec& model, const MonomialBasisZ& basis_z,
                             const MonomialBasisY& basis_y, double z, const Vec& u,
                             const Vec& y, double z0, double discount) {
  const Fields fl = eval_fields(model, u, y);
  if (std::abs(fl.F[0] - z) > 1e-6)
    throw std::invalid_argument("constraint_row: y is not on the level set of z");
  ConstraintRow row;
  row.t_coeff = -1.0;
  row.constant = fl.r;
  row.lambda_coeffs.resize(static_cast<std::size_t>(basis_z.count));
  for (int n = 0; n < basis_z.count; ++n)
    row.lambda_coeffs[static_cast<std::size_t>(n)] =
        basis_z.deriv(n, z) * fl.h[0] +
        discount * (basis_z.eval(n, z0) - basis_z.eval(n, z));
  row.omega_coeffs.resize(static_cast<std::size_t>(basis_y.count()));
  for (int j = 0; j < basis_y.count(); ++j) {
    const Vec g = basis_y.grad(j, y);
    row.omega_coeffs[static_cast<std::size_t>(j)] = dot(g, fl.f);
  }
  return row;
}

double DualSolution::zeta(double z) const {
  double p = 0.0;
  for (int i = basis_n - 1; i >= 0; --i)
    p = p * z + lambda[static_cast<std::size_t>(i)];
  return z * p;
}

double DualSolution::zeta_deriv(double z) const {
  double p = 0.0;
  for (int i = basis_n - 1; i >= 0; --i)
    p = p * z + (i + 1) * lambda[static_cast<std::size_t>(i)];
  return p;
}

int DualSolution::nearest_grid_index(double z) const {
  int best = 0;
  double bd = std::abs(z - z_grid[0]);
  for (std::size_t i = 1; i < z_grid.size(); ++i) {
    const double d = std::abs(z - z_grid[i]);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

void DualSolution::save(std::ostream& os) const {
  os << "slowobs_dual_v1\n";
  os << "n " << basis_n << "\n";
  os << "m " << basis_y.count() << "\n";
  os << "exps\n";
  for (const auto& e : basis_y.exps) os << e.i1 << ' ' << e.i2 << '\n';
  os << "z0 " << format_double(z0) << "\n";
  os << "discount " << format_double(discount) << "\n";
  os << "value " << format_double(value) << "\n";
  os << "max_violation " << format_double(max_violation) << "\n";
  os << "converged " << (converged ? 1 : 0) << "\n";
  os << "lambda\n";
  for (double v : lambda) os << format_double(v) << '\n';
  os << "z_grid " << z_grid.size() << "\n";
  for (double v : z_grid) os << format_double(v) << '\n';
  os << "omega\n";
  for (const Vec& w : omega) {
    for (std::size_t j = 0; j < w.size(); ++j)
      os << (j == 0 ? "" : " ") << format_double(w[j]);
    os << '\n';
  }
  os << "end\n";
}

namespace {

void expect_token(std::istream& is, const std::string& want) {
  std::string got;
  if (!(is >> got) || got != want)
    throw Error("DualSolution::load: expected '" + want + "', got '" + got + "'");
}

}  // namespace

DualSolution DualSolution::load(std::istream& is) {
  DualSolution d;
  std::string tok;
  if (!(is >> tok) || tok != "slowobs_dual_v1")
    throw Error("DualSolution::load: bad header");
  int n = 0, m = 0;
  expect_token(is, "n");
  is >> n;
  expect_token(is, "m");
  is >> m;
  if (n < 1 || m < 0 || !is) throw Error("DualSolution::load: bad sizes");
  d.basis_n = n;
  expect_token(is, "exps");
  d.basis_y.exps.resize(static_cast<std::size_t>(m));
  for (auto& e : d.basis_y.exps) is >> e.i1 >> e.i2;
  expect_token(is, "z0");
  is >> d.z0;
  expect_token(is, "discount");
  is >> d.discount;
  expect_token(is, "value");
  is >> d.value;
  expect_token(is, "max_violation");
  is >> d.max_violation;
  expect_token(is, "converged");
  int conv = 0;
  is >> conv;
  d.converged = conv != 0;
  expect_token(is, "lambda");
  d.lambda.resize(static_cast<std::size_t>(n));
  for (double& v : d.lambda) is >> v;
  expect_token(is, "z_grid");
  std::size_t g = 0;
  is >> g;
  d.z_grid.resize(g);
  for (double& v : d.z_grid) is >> v;
  expect_token(is, "omega");
  d.omega.assign(g, Vec(static_cast<std::size_t>(m)));
  for (Vec& w : d.omega)
    for (double& v : w) is >> v;
  expect_token(is, "end");
  if (!is) throw Error("DualSolution::load: truncated file");
  return d;
}

namespace {

struct NodeCache {
  Vec y;
  double r2 = 0.0, r1 = 0.0, r0 = 0.0;
  double h1 = 0.0, h0 = 0.0;
  Vec wf0, wf1;  // grad(phi_j) . f0 and grad(phi_j) . f1, j = 1..M
};

// The master works with zeta expanded in shifted-scaled monomials
// s^n, s = (z - c)/h with s in [-1, 1] on the grid hull: same span as z^n
// modulo constants (which cancel from zeta' and zeta(z0) - zeta(z)), but the
// columns stay O(1) instead of spanning five orders of magnitude. The stored
// certificate converts back to the raw z^i coefficients.
Vec shifted_to_raw_lambda(const Vec& lam_hat, double center, double half, int N) {
  std::vector<long double> acc(static_cast<std::size_t>(N + 1), 0.0L);
  std::vector<long double> pw(static_cast<std::size_t>(N + 1), 0.0L);
  pw[0] = 1.0L;
  for (int k = 1; k <= N; ++k) {
    std::vector<long double> nxt(static_cast<std::size_t>(N + 1), 0.0L);
    for (int i = 0; i < k; ++i) {
      nxt[static_cast<std::size_t>(i + 1)] += pw[static_cast<std::size_t>(i)] / half;
      nxt[static_cast<std::size_t>(i)] -=
          pw[static_cast<std::size_t>(i)] * center / half;
    }
    pw = nxt;
    const long double lh = lam_hat[static_cast<std::size_t>(k - 1)];
    if (lh != 0.0L)
      for (int i = 0; i <= k; ++i)
        acc[static_cast<std::size_t>(i)] += lh * pw[static_cast<std::size_t>(i)];
  }
  Vec raw(static_cast<std::size_t>(N));
  for (int i = 1; i <= N; ++i)
    raw[static_cast<std::size_t>(i - 1)] =
        static_cast<double>(acc[static_cast<std::size_t>(i)]);
  return raw;
}

struct LevelCache {
  double z = 0.0;
  Vec c_diff;  // C (psi_n(z0) - psi_n(z)), n = 1..N
  Vec psi_deriv;
  std::vector<NodeCache> nodes;
};

struct WorkingKey {
  int level = 0, node = 0;
  double u = 0.0;
};

struct ScanHit {
  int level = -1, node = -1;
  double u = 0.0;
  double violation = 0.0;  // row value minus t (negative = violated)
};

double row_value(const NodeCache& nc, double u, double zeta_d,
                 const Vec& omega_level, double lambda_dot_cdiff) {
  const double wf = dot(omega_level, nc.wf0) + u * dot(omega_level, nc.wf1);
  return nc.r2 * u * u + nc.r1 * u + nc.r0 + zeta_d * (nc.h1 * u + nc.h0) + wf +
         lambda_dot_cdiff;
}

}  // namespace

DualSolution solve_dual_exchange(const ProblemSpec& problem,
                                 const MonomialBasisZ& basis_z,
                                 const MonomialBasisY& basis_y, const Vec& z_grid,
                                 const std::vector<PeriodicOrbit>& orbits,
                                 const ExchangeConfig& cfg) {
  const ModelSpec& model = problem.model;
  if (model.k != 1)
    throw std::invalid_argument("solve_dual_exchange: only k = 1 supported");
  if (z_grid.empty())
    throw std::invalid_argument("solve_dual_exchange: empty z_grid");
  if (orbits.size() != z_grid.size())
    throw std::invalid_argument("solve_dual_exchange: one orbit per grid node required");
  const double z0 = problem.z0[0];
  const double C = problem.discount;
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    if (i > 0 && !(z_grid[i] > z_grid[i - 1]))
      throw std::invalid_argument("solve_dual_exchange: z_grid must be ascending");
    if (z_grid[i] < problem.z_lo[0] - 1e-9 || z_grid[i] > problem.z_hi[0] + 1e-9)
      throw std::invalid_argument("solve_dual_exchange: z_grid outside [z_lo, z_hi]");
    if (std::abs(orbits[i].level[0] - z_grid[i]) > 1e-6)
      throw std::invalid_argument("solve_dual_exchange: orbit level mismatch");
  }
  if (z0 < z_grid.front() - 1e-3 || z0 > z_grid.back() + 1e-3)
    throw std::invalid_argument("solve_dual_exchange: z0 outside the grid hull");

  const int N = basis_z.count;
  const int M = basis_y.count();
  const int G = static_cast<int>(z_grid.size());
  const double u_lo = model.u_lo[0], u_hi = model.u_hi[0];

  // Per-level, per-node coefficient caches, with the zeta block in the
  // shifted-scaled basis.
  const double z_center = 0.5 * (z_grid.front() + z_grid.back());
  const double z_half = std::max(0.5 * (z_grid.back() - z_grid.front()), 1e-12);
  const auto shifted = [&](double z) { return (z - z_center) / z_half; };
  const double s0 = shifted(z0);
  std::vector<LevelCache> levels(static_cast<std::size_t>(G));
  for (int i = 0; i < G; ++i) {
    LevelCache& lc = levels[static_cast<std::size_t>(i)];
    lc.z = z_grid[static_cast<std::size_t>(i)];
    const double s = shifted(lc.z);
    lc.c_diff.resize(static_cast<std::size_t>(N));
    lc.psi_deriv.resize(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
      lc.c_diff[static_cast<std::size_t>(n)] =
          C * (std::pow(s0, n + 1) - std::pow(s, n + 1));
      lc.psi_deriv[static_cast<std::size_t>(n)] =
          (n + 1) * std::pow(s, n) / z_half;
    }
    const PeriodicOrbit& orbit = orbits[static_cast<std::size_t>(i)];
    lc.nodes.resize(orbit.nodes.size());
    for (std::size_t j = 0; j < orbit.nodes.size(); ++j) {
      NodeCache& nc = lc.nodes[j];
      nc.y = orbit.nodes[j];
      const ControlAffine ca = control_affine_at(model, nc.y);
      nc.r2 = ca.r2;
      nc.r1 = ca.r1;
      nc.r0 = ca.r0;
      nc.h1 = ca.h1[0];
      nc.h0 = ca.h0[0];
      nc.wf0.resize(static_cast<std::size_t>(M));
      nc.wf1.resize(static_cast<std::size_t>(M));
      for (int mth = 0; mth < M; ++mth) {
        const Vec g = basis_y.grad(mth, nc.y);
        nc.wf0[static_cast<std::size_t>(mth)] = dot(g, ca.f0);
        nc.wf1[static_cast<std::size_t>(mth)] = dot(g, ca.f1);
      }
    }
  }

  // Joint LP variables: x = (t, lambda_1..N, omega per level 1..M each).
  // The raw monomial columns span several orders of magnitude, so the master
  // works in power-of-two column-equilibrated units (exact to rescale).
  const int n_vars = 1 + N + G * M;
  const auto omega_offset = [&](int level) { return 1 + N + level * M; };

  Vec col_scale(static_cast<std::size_t>(n_vars), 1.0);
  {
    const auto pow2_inv = [](double mag) {
      if (!(mag > 0.0)) return 1.0;
      return std::ldexp(1.0, -static_cast<int>(std::lround(std::log2(mag))));
    };
    for (int n = 0; n < N; ++n) {
      double mag = 0.0;
      for (const LevelCache& lc : levels) {
        double hmax = 0.0;
        for (const NodeCache& nc : lc.nodes)
          hmax = std::max({hmax, std::abs(nc.h1 * u_lo + nc.h0),
                           std::abs(nc.h1 * u_hi + nc.h0)});
        mag = std::max(mag,
                       std::abs(lc.psi_deriv[static_cast<std::size_t>(n)]) * hmax +
                           std::abs(lc.c_diff[static_cast<std::size_t>(n)]));
      }
      col_scale[static_cast<std::size_t>(1 + n)] = pow2_inv(mag);
    }
    for (int i = 0; i < G; ++i) {
      const LevelCache& lc = levels[static_cast<std::size_t>(i)];
      for (int mth = 0; mth < M; ++mth) {
        double mag = 0.0;
        for (const NodeCache& nc : lc.nodes) {
          const double w0 = nc.wf0[static_cast<std::size_t>(mth)];
          const double w1 = nc.wf1[static_cast<std::size_t>(mth)];
          mag = std::max({mag, std::abs(w0 + u_lo * w1), std::abs(w0 + u_hi * w1)});
        }
        col_scale[static_cast<std::size_t>(omega_offset(i) + mth)] = pow2_inv(mag);
      }
    }
  }

  std::vector<WorkingKey> working;
  const auto already_in_working = [&](int level, int node, double u) {
    for (const WorkingKey& w : working)
      if (w.level == level && w.node == node && std::abs(w.u - u) <= 1e-9)
        return true;
    return false;
  };

  detail::SimplexEngine engine;
  Vec obj(static_cast<std::size_t>(n_vars), 0.0);
  obj[0] = 1.0;  // maximize t

  const auto scaled_row = [&](const WorkingKey& key, Vec& coeffs, double& rhs) {
    const LevelCache& lc = levels[static_cast<std::size_t>(key.level)];
    const NodeCache& nc = lc.nodes[static_cast<std::size_t>(key.node)];
    const double u = key.u;
    coeffs.assign(static_cast<std::size_t>(n_vars), 0.0);
    coeffs[0] = -1.0 * col_scale[0];
    for (int n = 0; n < N; ++n)
      coeffs[static_cast<std::size_t>(1 + n)] =
          (lc.psi_deriv[static_cast<std::size_t>(n)] * (nc.h1 * u + nc.h0) +
           lc.c_diff[static_cast<std::size_t>(n)]) *
          col_scale[static_cast<std::size_t>(1 + n)];
    const int off = omega_offset(key.level);
    for (int mth = 0; mth < M; ++mth)
      coeffs[static_cast<std::size_t>(off + mth)] =
          (nc.wf0[static_cast<std::size_t>(mth)] +
           u * nc.wf1[static_cast<std::size_t>(mth)]) *
          col_scale[static_cast<std::size_t>(off + mth)];
    rhs = -(nc.r2 * u * u + nc.r1 * u + nc.r0);
  };
  const auto append_row = [&](int level, int node, double u) {
    working.push_back(WorkingKey{level, node, u});
    Vec coeffs;
    double rhs = 0.0;
    scaled_row(working.back(), coeffs, rhs);
    engine.add_row(coeffs, Sense::ge, rhs);
  };
  // Fresh tableau over the current working set; also the drift-recovery path.
  double bound = cfg.var_bound;
  const auto rebuild = [&]() {
    engine.init(n_vars, Vec(static_cast<std::size_t>(n_vars), -bound),
                Vec(static_cast<std::size_t>(n_vars), bound));
    engine.set_objective(obj);
    Vec coeffs;
    double rhs = 0.0;
    for (const WorkingKey& key : working) {
      scaled_row(key, coeffs, rhs);
      engine.add_row(coeffs, Sense::ge, rhs);
    }
    return engine.primal_solve();
  };

  // Initial working set: per level, the extreme-y1 nodes plus a coarse spread
  // along the orbit, each at the control-box corners.
  for (int i = 0; i < G; ++i) {
    const LevelCache& lc = levels[static_cast<std::size_t>(i)];
    const int n_nodes = static_cast<int>(lc.nodes.size());
    int jmin = 0, jmax = 0;
    for (int j = 1; j < n_nodes; ++j) {
      if (lc.nodes[static_cast<std::size_t>(j)].y[0] <
          lc.nodes[static_cast<std::size_t>(jmin)].y[0])
        jmin = j;
      if (lc.nodes[static_cast<std::size_t>(j)].y[0] >
          lc.nodes[static_cast<std::size_t>(jmax)].y[0])
        jmax = j;
    }
    std::vector<int> picks{jmin, jmax};
    for (int k = 0; k < 8; ++k) picks.push_back(k * n_nodes / 8);
    for (int j : picks) {
      if (already_in_working(i, j, u_lo)) continue;
      working.push_back(WorkingKey{i, j, u_lo});
      if (u_hi > u_lo) working.push_back(WorkingKey{i, j, u_hi});
    }
  }

  LpStatus status = rebuild();
  if (status != LpStatus::optimal)
    throw LpSolveError("solve_dual_exchange: initial master not optimal");

  Vec lam_hat(static_cast<std::size_t>(N), 0.0);
  const auto extract = [&](DualSolution& d) {
    const Vec x = engine.structural_values();
    d.basis_n = N;
    d.basis_y = basis_y;
    for (int n = 0; n < N; ++n)
      lam_hat[static_cast<std::size_t>(n)] =
          x[static_cast<std::size_t>(1 + n)] * col_scale[static_cast<std::size_t>(1 + n)];
    d.lambda = shifted_to_raw_lambda(lam_hat, z_center, z_half, N);
    d.z_grid = z_grid;
    d.omega.assign(static_cast<std::size_t>(G), Vec(static_cast<std::size_t>(M)));
    for (int i = 0; i < G; ++i) {
      const int off = omega_offset(i);
      for (int mth = 0; mth < M; ++mth)
        d.omega[static_cast<std::size_t>(i)][static_cast<std::size_t>(mth)] =
            x[static_cast<std::size_t>(off + mth)] *
            col_scale[static_cast<std::size_t>(off + mth)];
    }
    d.value = x[0] * col_scale[0];
    d.z0 = z0;
    d.discount = C;
  };

  DualSolution dual;
  double last_value = kInf;
  bool fresh = true;  // tableau was rebuilt since the last row addition
  int since_rebuild = 0;
  int escalations = 0;
  double value_before_escalation = 0.0;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    extract(dual);
    if (dual.value > last_value + 1e-5 * (1.0 + std::abs(last_value))) {
      // accumulated tableau drift; restore accuracy from the original rows
      if (rebuild() != LpStatus::optimal)
        throw LpSolveError("solve_dual_exchange: master rebuild failed");
      fresh = true;
      since_rebuild = 0;
      extract(dual);
      if (dual.value > last_value + 3e-4 * (1.0 + std::abs(last_value)))
        throw LpSolveError("solve_dual_exchange: master value increased");
    }
    last_value = std::min(last_value, dual.value);

    // Scan: per level and orbit node, minimize the row over u (exactly, since
    // the builtin models are quadratic in u) and track the worst violation.
    double worst = 0.0;
    std::vector<ScanHit> hits(static_cast<std::size_t>(G));
    for (int i = 0; i < G; ++i) {
      const LevelCache& lc = levels[static_cast<std::size_t>(i)];
      const double zeta_d = dot(lam_hat, lc.psi_deriv);
      const double lam_cdiff = dot(lam_hat, lc.c_diff);
      const Vec& om = dual.omega[static_cast<std::size_t>(i)];
      ScanHit& hit = hits[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < lc.nodes.size(); ++j) {
        const NodeCache& nc = lc.nodes[j];
        const double B = nc.r1 + zeta_d * nc.h1 + dot(om, nc.wf1);
        double u;
        if (nc.r2 > 0.0) {
          u = argmin_box_quadratic(nc.r2, B, u_lo, u_hi);
        } else {
          // coarse grid + corners (general fallback; unused by the builtins)
          u = u_lo;
          double bestv = kInf;
          for (int gidx = 0; gidx < cfg.control_grid; ++gidx) {
            const double uu =
                u_lo + (u_hi - u_lo) * gidx / std::max(1, cfg.control_grid - 1);
            const double v = nc.r2 * uu * uu + B * uu;
            if (v < bestv) {
              bestv = v;
              u = uu;
            }
          }
        }
        const double v = row_value(nc, u, zeta_d, om, lam_cdiff) - dual.value;
        if (v < hit.violation) {
          hit = ScanHit{i, static_cast<int>(j), u, v};
        }
        if (v < worst) worst = v;
      }
    }

    dual.max_violation = std::max(0.0, -worst);
    if (cfg.trace) cfg.trace(iter, dual.value, dual.max_violation, engine.rows());
    if (worst >= -cfg.tol) {
      // accept only a certificate computed on a drift-free tableau
      if (!fresh) {
        if (rebuild() != LpStatus::optimal)
          throw LpSolveError("solve_dual_exchange: master rebuild failed");
        fresh = true;
        since_rebuild = 0;
        continue;  // rescan against the polished solution
      }
      double biggest = 0.0;
      const Vec x = engine.structural_values();
      for (double v : x) biggest = std::max(biggest, std::abs(v));
      if (biggest > 0.999 * bound) {
        // Rail contact: degenerate omega directions drift there without moving
        // the value. Widen the box and confirm insensitivity; only a value
        // that keeps moving with the box is a genuinely clipped certificate.
        if (escalations >= 1 &&
            std::abs(dual.value - value_before_escalation) <=
                1e-5 * (1.0 + std::abs(dual.value))) {
          dual.converged = true;
          return dual;
        }
        if (escalations >= 3)
          throw LpSolveError(
              "solve_dual_exchange: certificate pinned at the variable box");
        ++escalations;
        value_before_escalation = dual.value;
        bound *= 8.0;
        last_value = kInf;
        if (rebuild() != LpStatus::optimal)
          throw LpSolveError("solve_dual_exchange: master rebuild failed");
        fresh = true;
        since_rebuild = 0;
        continue;
      }
      dual.converged = true;
      return dual;
    }

    // Near convergence, enforce a small u-bracket around each hit: the rows
    // are quadratic in u, so pinning u*, u* +- delta caps the minimum over u
    // at r2 delta^2 / 4, well under tol. A lone row at the exact minimizer
    // invites chatter once violations are small.
    const double du_bracket = 1e-3 * (u_hi - u_lo);
    const bool bracket = dual.max_violation < 1e-2;
    bool added = false;
    for (int i = 0; i < G; ++i) {
      const ScanHit& hit = hits[static_cast<std::size_t>(i)];
      if (hit.level < 0 || hit.violation >= -cfg.tol) continue;
      std::vector<double> us{hit.u};
      if (bracket) {
        us.push_back(hit.u - du_bracket);
        us.push_back(hit.u + du_bracket);
      }
      for (double u : us) {
        u = std::min(std::max(u, u_lo), u_hi);
        if (already_in_working(hit.level, hit.node, u)) continue;
        append_row(hit.level, hit.node, u);
        added = true;
      }
    }
    if (!added) {
      if (!fresh) {
        // The engine claims the violated rows hold; recheck on a fresh tableau
        // before concluding anything.
        if (rebuild() != LpStatus::optimal)
          throw LpSolveError("solve_dual_exchange: master rebuild failed");
        fresh = true;
        since_rebuild = 0;
        continue;
      }
      // Every violated row is already enforced on a drift-free tableau: this
      // is the precision floor of the monomial data; report what the scan sees.
      dual.converged = true;
      return dual;
    }
    fresh = false;
    if (++since_rebuild >= 25) {
      if (rebuild() != LpStatus::optimal)
        throw LpSolveError("solve_dual_exchange: master rebuild failed");
      fresh = true;
      since_rebuild = 0;
      continue;
    }
    // Dual pivots restore feasibility; a dual-feasible primal-feasible stop is
    // optimal, so no extra certification pass. The rebuild cadence and the
    // monotonicity guard cover numerical drift.
    try {
      status = engine.dual_reoptimize();
    } catch (const LpSolveError&) {
      status = rebuild();
      fresh = true;
      since_rebuild = 0;
    }
    if (status != LpStatus::optimal)
      throw LpSolveError("solve_dual_exchange: master re-solve failed");
  }

  extract(dual);
  dual.converged = false;
  throw ExchangeError("solve_dual_exchange: iteration cap reached", dual);
}

CertificateDiagnostics certificate_diagnostics(const DualSolution& dual) {
  CertificateDiagnostics out;
  out.zeta_values.reserve(dual.z_grid.size());
  out.zeta_derivs.reserve(dual.z_grid.size());
  bool monotone = true;
  for (double z : dual.z_grid) {
    out.zeta_values.push_back(dual.zeta(z));
    const double d = dual.zeta_deriv(z);
    out.zeta_derivs.push_back(d);
    if (!(d < 0.0)) monotone = false;
  }
  out.monotone_decreasing = monotone;
  return out;
}

}  // namespace slowobs
