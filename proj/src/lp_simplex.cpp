#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "simplex_engine.hpp"

namespace slowobs::detail {

void SimplexEngine::init(int n_struct, const Vec& lo, const Vec& hi) {
  n_struct_ = n_struct;
  m_ = 0;
  n_total_ = n_struct;
  T_.clear();
  basis_.clear();
  orig_.clear();
  pivot_count_ = 0;
  dual_row_valid_ = false;
  lo_ = lo;
  hi_ = hi;
  stat_.assign(static_cast<std::size_t>(n_struct), ColStatus::nb_point);
  xval_.assign(static_cast<std::size_t>(n_struct), 0.0);
  obj_.assign(static_cast<std::size_t>(n_struct), 0.0);
  tolf_.assign(static_cast<std::size_t>(n_struct), kTolFeas);
  for (int j = 0; j < n_struct; ++j) {
    const auto js = static_cast<std::size_t>(j);
    double mag = 0.0;
    if (std::isfinite(lo_[js])) mag = std::max(mag, std::abs(lo_[js]));
    if (std::isfinite(hi_[js])) mag = std::max(mag, std::abs(hi_[js]));
    tolf_[js] = kTolFeas * (1.0 + mag);
    if (lo_[js] <= 0.0 && hi_[js] >= 0.0) {
      stat_[js] = ColStatus::nb_point;  // park at zero
      xval_[js] = 0.0;
    } else if (std::isfinite(lo_[js])) {
      stat_[js] = ColStatus::at_lo;
      xval_[js] = lo_[js];
    } else {
      stat_[js] = ColStatus::at_hi;
      xval_[js] = hi_[js];
    }
  }
}

void SimplexEngine::set_objective(const Vec& structural_obj) {
  for (int j = 0; j < n_struct_; ++j)
    obj_[static_cast<std::size_t>(j)] = structural_obj[static_cast<std::size_t>(j)];
  dual_row_valid_ = false;
}

int SimplexEngine::add_row(const Vec& structural_coeffs, Sense sense, double rhs) {
  const int row = m_;
  orig_.push_back(LpRow{structural_coeffs, sense, rhs});

  // Extend every column-indexed array with the new logical.
  for (auto& t : T_) t.push_back(0.0);
  ++n_total_;
  double wlo = 0.0, whi = 0.0;
  switch (sense) {
    case Sense::le: wlo = 0.0; whi = kInf; break;
    case Sense::ge: wlo = -kInf; whi = 0.0; break;
    case Sense::eq: wlo = 0.0; whi = 0.0; break;
  }
  lo_.push_back(wlo);
  hi_.push_back(whi);
  obj_.push_back(0.0);
  stat_.push_back(ColStatus::basic);
  tolf_.push_back(kTolFeas * (1.0 + std::abs(rhs)));
  if (dual_row_valid_) dual_row_.push_back(0.0);

  // New tableau row in original coordinates, then reduced by the basis.
  Vec tab(static_cast<std::size_t>(n_total_), 0.0);
  for (int j = 0; j < n_struct_ && j < static_cast<int>(structural_coeffs.size()); ++j)
    tab[static_cast<std::size_t>(j)] = structural_coeffs[static_cast<std::size_t>(j)];
  tab[static_cast<std::size_t>(n_total_ - 1)] = 1.0;
  for (int i = 0; i < m_; ++i) {
    const double c = tab[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
    if (c != 0.0) {
      const Vec& ti = T_[static_cast<std::size_t>(i)];
      for (int j = 0; j < n_total_; ++j)
        tab[static_cast<std::size_t>(j)] -= c * ti[static_cast<std::size_t>(j)];
      tab[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = 0.0;
    }
  }
  T_.push_back(std::move(tab));
  basis_.push_back(n_total_ - 1);

  double w = rhs;
  for (int j = 0; j < n_struct_ && j < static_cast<int>(structural_coeffs.size()); ++j)
    w -= structural_coeffs[static_cast<std::size_t>(j)] * xval_[static_cast<std::size_t>(j)];
  xval_.push_back(w);
  ++m_;
  return row;
}

Vec SimplexEngine::reduced_costs(const Vec& cost) const {
  Vec d = cost;
  for (int i = 0; i < m_; ++i) {
    const double cb = cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
    if (cb != 0.0) {
      const Vec& ti = T_[static_cast<std::size_t>(i)];
      for (int j = 0; j < n_total_; ++j)
        d[static_cast<std::size_t>(j)] -= cb * ti[static_cast<std::size_t>(j)];
    }
  }
  return d;
}

void SimplexEngine::ensure_dual_row() {
  if (!dual_row_valid_) {
    dual_row_ = reduced_costs(obj_);
    dual_row_valid_ = true;
  }
}

double SimplexEngine::col_tolf(int col) const {
  return tolf_[static_cast<std::size_t>(col)];
}

double SimplexEngine::bound_violation(int col) const {
  const auto c = static_cast<std::size_t>(col);
  return std::max({0.0, lo_[c] - xval_[c], xval_[c] - hi_[c]});
}

Vec SimplexEngine::phase1_costs() const {
  Vec c(static_cast<std::size_t>(n_total_), 0.0);
  for (int i = 0; i < m_; ++i) {
    const int q = basis_[static_cast<std::size_t>(i)];
    if (bound_violation(q) <= col_tolf(q)) continue;
    const auto qs = static_cast<std::size_t>(q);
    c[qs] = xval_[qs] < lo_[qs] ? 1.0 : -1.0;
  }
  return c;
}

bool SimplexEngine::any_counted_infeasible() const {
  for (int i = 0; i < m_; ++i) {
    const int q = basis_[static_cast<std::size_t>(i)];
    if (bound_violation(q) > col_tolf(q)) return true;
  }
  return false;
}

double SimplexEngine::total_infeasibility() const {
  double s = 0.0;
  for (int i = 0; i < m_; ++i)
    s += bound_violation(basis_[static_cast<std::size_t>(i)]);
  return s;
}

void SimplexEngine::pivot(int row, int col) {
  Vec& pr = T_[static_cast<std::size_t>(row)];
  const double inv = 1.0 / pr[static_cast<std::size_t>(col)];
  for (int j = 0; j < n_total_; ++j) pr[static_cast<std::size_t>(j)] *= inv;
  pr[static_cast<std::size_t>(col)] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == row) continue;
    Vec& ti = T_[static_cast<std::size_t>(i)];
    const double c = ti[static_cast<std::size_t>(col)];
    if (c != 0.0) {
      const double* p = pr.data();
      double* t = ti.data();
      for (int j = 0; j < n_total_; ++j) t[j] -= c * p[j];
      ti[static_cast<std::size_t>(col)] = 0.0;
    }
  }
  if (dual_row_valid_) {
    const double c = dual_row_[static_cast<std::size_t>(col)];
    if (c != 0.0) {
      for (int j = 0; j < n_total_; ++j)
        dual_row_[static_cast<std::size_t>(j)] -= c * pr[static_cast<std::size_t>(j)];
      dual_row_[static_cast<std::size_t>(col)] = 0.0;
    }
  }
  basis_[static_cast<std::size_t>(row)] = col;
  ++pivot_count_;
  if (pivot_count_ % kRefreshEvery == 0) {
    recompute_basic_values();
    if (dual_row_valid_) {
      dual_row_ = reduced_costs(obj_);
    }
  }
}

void SimplexEngine::recompute_basic_values() {
  Vec acc(static_cast<std::size_t>(m_), 0.0);
  for (int k = 0; k < m_; ++k) {
    const double bk = orig_[static_cast<std::size_t>(k)].rhs;
    if (bk != 0.0) {
      const auto col = static_cast<std::size_t>(n_struct_ + k);
      for (int i = 0; i < m_; ++i)
        acc[static_cast<std::size_t>(i)] += T_[static_cast<std::size_t>(i)][col] * bk;
    }
  }
  for (int j = 0; j < n_total_; ++j) {
    const auto js = static_cast<std::size_t>(j);
    if (stat_[js] == ColStatus::basic || xval_[js] == 0.0) continue;
    const double v = xval_[js];
    for (int i = 0; i < m_; ++i)
      acc[static_cast<std::size_t>(i)] -= T_[static_cast<std::size_t>(i)][js] * v;
  }
  for (int i = 0; i < m_; ++i)
    xval_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] =
        acc[static_cast<std::size_t>(i)];
}

LpStatus SimplexEngine::primal_solve() {
  recompute_basic_values();
  dual_row_valid_ = false;
  long iter = 0;
  const long bland_after = 10L * (m_ + n_total_);
  const long cap = 40L * (m_ + n_total_) + 50000;
  const bool trace = std::getenv("SLOWOBS_LP_TRACE") != nullptr;
  bool rechecked = false;
  int recoveries = 0;
  while (true) {
    if (++iter > cap) throw LpSolveError("simplex: iteration cap exceeded");
    if (trace && iter % 5000 == 0)
      std::fprintf(stderr, "[lp] primal iter=%ld m=%d infeas=%.3e obj=%.8f\n",
                   iter, m_, total_infeasibility(), objective_value());
    const bool bland = iter > bland_after;
    const bool phase1 = any_counted_infeasible();

    Vec d_storage;
    const Vec* d;
    if (phase1) {
      d_storage = reduced_costs(phase1_costs());
      d = &d_storage;
      dual_row_valid_ = false;
    } else {
      ensure_dual_row();
      d = &dual_row_;
    }

    int enter = -1, dir = 0;
    double best = 0.0;
    for (int j = 0; j < n_total_; ++j) {
      const auto js = static_cast<std::size_t>(j);
      if (stat_[js] == ColStatus::basic) continue;
      if (!(hi_[js] - lo_[js] > 0.0)) continue;
      const double dj = (*d)[js];
      int cand = 0;
      if (stat_[js] == ColStatus::at_lo && dj > kTolDual) cand = 1;
      else if (stat_[js] == ColStatus::at_hi && dj < -kTolDual) cand = -1;
      else if (stat_[js] == ColStatus::nb_point && std::abs(dj) > kTolDual)
        cand = dj > 0.0 ? 1 : -1;
      if (cand == 0) continue;
      if (bland) {
        enter = j;
        dir = cand;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        enter = j;
        dir = cand;
      }
    }
    if (enter < 0) {
      if (phase1) {
        // Residual violations may be pivoting debris rather than genuine
        // infeasibility; clamp mild ones onto their bounds and continue.
        bool recoverable = recoveries < 5;
        for (int i = 0; i < m_ && recoverable; ++i) {
          const int q = basis_[static_cast<std::size_t>(i)];
          if (bound_violation(q) > 1e3 * col_tolf(q)) recoverable = false;
        }
        if (!recoverable) return LpStatus::infeasible;
        ++recoveries;
        for (int i = 0; i < m_; ++i) {
          const auto q =
              static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)]);
          xval_[q] = std::min(std::max(xval_[q], lo_[q]), hi_[q]);
        }
        continue;
      }
      // Confirm optimality against freshly computed reduced costs once.
      if (!rechecked) {
        rechecked = true;
        dual_row_ = reduced_costs(obj_);
        dual_row_valid_ = true;
        --iter;
        continue;
      }
      recompute_basic_values();
      return LpStatus::optimal;
    }
    rechecked = false;

    // Ratio test. delta starts at the entering variable's own headroom.
    const auto es = static_cast<std::size_t>(enter);
    double delta = kInf;
    if (stat_[es] == ColStatus::nb_point) {
      const double head = dir > 0 ? hi_[es] - xval_[es] : xval_[es] - lo_[es];
      if (std::isfinite(head)) delta = std::max(0.0, head);
    } else if (std::isfinite(hi_[es] - lo_[es])) {
      delta = hi_[es] - lo_[es];
    }
    int leave_row = -1, leave_to = 0;
    double leave_alpha = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double alpha = T_[static_cast<std::size_t>(i)][es];
      if (std::abs(alpha) <= kTolPivot) continue;
      const double rate = -dir * alpha;
      const int qcol = basis_[static_cast<std::size_t>(i)];
      const auto q = static_cast<std::size_t>(qcol);
      const double v = xval_[q];
      const double tq = col_tolf(qcol);
      double lim = kInf;
      int to = 0;
      if (phase1 && v < lo_[q] - tq) {
        if (rate > 0.0) {
          lim = (lo_[q] - v) / rate;
          to = -1;
        }
      } else if (phase1 && v > hi_[q] + tq) {
        if (rate < 0.0) {
          lim = (v - hi_[q]) / (-rate);
          to = +1;
        }
      } else if (rate > 0.0) {
        if (std::isfinite(hi_[q])) {
          lim = std::max(0.0, (hi_[q] - v) / rate);
          to = +1;
        }
      } else {
        if (std::isfinite(lo_[q])) {
          lim = std::max(0.0, (v - lo_[q]) / (-rate));
          to = -1;
        }
      }
      if (!std::isfinite(lim)) continue;
      bool take = false;
      if (lim < delta - 1e-12) {
        take = true;
      } else if (lim <= delta + 1e-12 && leave_row >= 0) {
        if (bland)
          take = basis_[static_cast<std::size_t>(i)] <
                 basis_[static_cast<std::size_t>(leave_row)];
        else
          take = std::abs(alpha) > std::abs(leave_alpha);
      } else if (lim <= delta + 1e-12 && leave_row < 0 && lim < delta) {
        take = true;
      }
      if (take) {
        delta = std::min(delta, lim);
        leave_row = i;
        leave_to = to;
        leave_alpha = alpha;
      }
    }
    if (!std::isfinite(delta)) {
      if (phase1) throw LpSolveError("simplex: unbounded phase-1 direction");
      return LpStatus::unbounded;
    }

    const double step = dir * delta;
    if (step != 0.0) {
      for (int i = 0; i < m_; ++i) {
        const double alpha = T_[static_cast<std::size_t>(i)][es];
        if (alpha != 0.0)
          xval_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] -=
              step * alpha;
      }
      xval_[es] += step;
    }
    if (leave_row < 0) {
      if (stat_[es] == ColStatus::nb_point)
        stat_[es] = dir > 0 ? ColStatus::at_hi : ColStatus::at_lo;
      else
        stat_[es] =
            stat_[es] == ColStatus::at_lo ? ColStatus::at_hi : ColStatus::at_lo;
      xval_[es] = bound_value(enter, stat_[es]);
    } else {
      const int q = basis_[static_cast<std::size_t>(leave_row)];
      pivot(leave_row, enter);
      stat_[static_cast<std::size_t>(q)] =
          leave_to < 0 ? ColStatus::at_lo : ColStatus::at_hi;
      xval_[static_cast<std::size_t>(q)] =
          bound_value(q, stat_[static_cast<std::size_t>(q)]);
      stat_[es] = ColStatus::basic;
    }
  }
}

LpStatus SimplexEngine::dual_reoptimize() {
  ensure_dual_row();
  long iter = 0;
  const long cap = 10L * (m_ + n_total_) + 20000;
  const bool trace = std::getenv("SLOWOBS_LP_TRACE") != nullptr;
  bool refreshed = false;
  while (true) {
    if (++iter > cap) throw LpSolveError("dual simplex: iteration cap exceeded");
    if (trace && iter % 5000 == 0)
      std::fprintf(stderr, "[lp] dual iter=%ld m=%d\n", iter, m_);
    int row = -1, need = 0;
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int qcol = basis_[static_cast<std::size_t>(i)];
      const auto q = static_cast<std::size_t>(qcol);
      const double tq = col_tolf(qcol);
      const double below = lo_[q] - xval_[q];
      const double above = xval_[q] - hi_[q];
      if (below > tq && below > worst) {
        worst = below;
        row = i;
        need = +1;
      }
      if (above > tq && above > worst) {
        worst = above;
        row = i;
        need = -1;
      }
    }
    if (row < 0) {
      if (!refreshed) {
        refreshed = true;
        recompute_basic_values();
        continue;
      }
      return LpStatus::optimal;
    }
    refreshed = false;

    const Vec& tr = T_[static_cast<std::size_t>(row)];
    int enter = -1, enter_dir = 0;
    double best_ratio = kInf, best_alpha = 0.0;
    for (int j = 0; j < n_total_; ++j) {
      const auto js = static_cast<std::size_t>(j);
      if (stat_[js] == ColStatus::basic) continue;
      const double alpha = tr[js];
      if (std::abs(alpha) <= kTolPivot) continue;
      int dir = 0;
      if (stat_[js] == ColStatus::at_lo || stat_[js] == ColStatus::nb_point) {
        const double rate = -alpha;  // entering increases
        if ((need > 0 && rate > 0.0) || (need < 0 && rate < 0.0)) dir = +1;
      }
      if (dir == 0 &&
          (stat_[js] == ColStatus::at_hi || stat_[js] == ColStatus::nb_point)) {
        const double rate = alpha;  // entering decreases
        if ((need > 0 && rate > 0.0) || (need < 0 && rate < 0.0)) dir = -1;
      }
      if (dir == 0) continue;
      const double ratio = std::abs(dual_row_[js]) / std::abs(alpha);
      if (ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 &&
           (enter < 0 || std::abs(alpha) > std::abs(best_alpha)))) {
        best_ratio = ratio;
        best_alpha = alpha;
        enter = j;
        enter_dir = dir;
      }
    }
    if (enter < 0) return LpStatus::infeasible;

    const auto qs = static_cast<std::size_t>(basis_[static_cast<std::size_t>(row)]);
    const double beta = need > 0 ? lo_[qs] : hi_[qs];
    const double step = (beta - xval_[qs]) / (-best_alpha);
    const auto es = static_cast<std::size_t>(enter);
    const double head =
        step > 0.0 ? hi_[es] - xval_[es] : xval_[es] - lo_[es];
    if (std::isfinite(head) && std::abs(step) > head + kTolFeas)
      throw LpSolveError("dual simplex: step exceeds entering headroom");
    (void)enter_dir;
    for (int i = 0; i < m_; ++i) {
      const double alpha = T_[static_cast<std::size_t>(i)][es];
      if (alpha != 0.0)
        xval_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] -=
            step * alpha;
    }
    xval_[es] += step;
    const int q = basis_[static_cast<std::size_t>(row)];
    pivot(row, enter);
    stat_[static_cast<std::size_t>(q)] = need > 0 ? ColStatus::at_lo : ColStatus::at_hi;
    xval_[static_cast<std::size_t>(q)] = beta;
    stat_[es] = ColStatus::basic;
  }
}

double SimplexEngine::objective_value() const {
  double s = 0.0;
  for (int j = 0; j < n_struct_; ++j)
    s += obj_[static_cast<std::size_t>(j)] * xval_[static_cast<std::size_t>(j)];
  return s;
}

Vec SimplexEngine::structural_values() const {
  return Vec(xval_.begin(), xval_.begin() + n_struct_);
}

Vec SimplexEngine::logical_duals() {
  ensure_dual_row();
  Vec y(static_cast<std::size_t>(m_));
  for (int i = 0; i < m_; ++i)
    y[static_cast<std::size_t>(i)] = -dual_row_[static_cast<std::size_t>(n_struct_ + i)];
  return y;
}

double SimplexEngine::max_primal_residual() const {
  double worst = 0.0;
  for (int i = 0; i < m_; ++i) {
    const LpRow& r = orig_[static_cast<std::size_t>(i)];
    double ax = 0.0;
    for (std::size_t j = 0; j < r.coeffs.size(); ++j) ax += r.coeffs[j] * xval_[j];
    double v = 0.0;
    switch (r.sense) {
      case Sense::le: v = std::max(0.0, ax - r.rhs); break;
      case Sense::ge: v = std::max(0.0, r.rhs - ax); break;
      case Sense::eq: v = std::abs(ax - r.rhs); break;
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace slowobs::detail

namespace slowobs {

double argmin_box_quadratic(double A, double B, double lo, double hi) {
  if (A > 0.0) {
    const double u = -B / (2.0 * A);
    return std::min(std::max(u, lo), hi);
  }
  // Linear (or concave): the minimum sits at a box corner; ties toward the
  // smaller magnitude.
  const double at_lo = A * lo * lo + B * lo;
  const double at_hi = A * hi * hi + B * hi;
  if (at_lo < at_hi) return lo;
  if (at_hi < at_lo) return hi;
  return std::abs(lo) <= std::abs(hi) ? lo : hi;
}

LpSolution solve_finite_lp(const FiniteLP& lp) {
  const int n = lp.num_vars;
  if (static_cast<int>(lp.objective.size()) != n)
    throw std::invalid_argument("solve_finite_lp: objective size mismatch");
  Vec lo = lp.lower, hi = lp.upper;
  if (lo.empty()) lo.assign(static_cast<std::size_t>(n), -kInf);
  if (hi.empty()) hi.assign(static_cast<std::size_t>(n), kInf);
  if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
    throw std::invalid_argument("solve_finite_lp: bound size mismatch");
  for (const LpRow& r : lp.rows)
    if (static_cast<int>(r.coeffs.size()) != n)
      throw std::invalid_argument("solve_finite_lp: row size mismatch");

  detail::SimplexEngine eng;
  eng.init(n, lo, hi);
  Vec c = lp.objective;
  if (!lp.maximize)
    for (double& v : c) v = -v;
  eng.set_objective(c);
  for (const LpRow& r : lp.rows) eng.add_row(r.coeffs, r.sense, r.rhs);

  LpSolution out;
  out.status = eng.primal_solve();
  if (out.status == LpStatus::optimal) {
    out.x = eng.structural_values();
    out.value = lp.maximize ? eng.objective_value() : -eng.objective_value();
    out.row_duals = eng.logical_duals();
    if (!lp.maximize)
      for (double& v : out.row_duals) v = -v;
  } else if (out.status == LpStatus::unbounded) {
    out.value = lp.maximize ? kInf : -kInf;
  } else {
    out.value = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace slowobs
