#pragma once

#include "slowobs/lp.hpp"

namespace slowobs::detail {

// nb_point: nonbasic parked at xval (an interior point, normally 0); used for
// free columns and as the neutral start for box-bounded columns.
enum class ColStatus : unsigned char { at_lo, at_hi, nb_point, basic };

/// Dense bounded-variable simplex over a full tableau. Every row carries a
/// logical column whose bounds encode the sense (le: [0,inf), ge: (-inf,0],
/// eq: [0,0]), so the all-logical basis is always available. Rows can be
/// appended after a solve and feasibility restored by dual pivots, which is
/// what the constraint exchange uses.
class SimplexEngine {
 public:
  void init(int n_struct, const Vec& lo, const Vec& hi);
  void set_objective(const Vec& structural_obj);  // maximized

  int add_row(const Vec& structural_coeffs, Sense sense, double rhs);

  LpStatus primal_solve();
  /// Requires a dual-feasible basis (e.g. right after an optimal solve plus
  /// added rows). Throws LpSolveError when it cannot proceed; callers fall
  /// back to primal_solve().
  LpStatus dual_reoptimize();

  double objective_value() const;
  Vec structural_values() const;
  Vec logical_duals();
  double max_primal_residual() const;
  int rows() const { return m_; }
  long pivots() const { return pivot_count_; }

 private:
  int n_struct_ = 0;
  int m_ = 0;
  int n_total_ = 0;
  std::vector<Vec> T_;          // m_ rows of length n_total_
  std::vector<int> basis_;      // row -> column
  std::vector<ColStatus> stat_; // column
  Vec lo_, hi_, xval_;          // column
  Vec tolf_;                    // per-column feasibility slack (magnitude-aware)
  Vec obj_;                     // column (logicals 0)
  Vec dual_row_;                // maintained reduced costs of obj_
  bool dual_row_valid_ = false;
  std::vector<LpRow> orig_;
  long pivot_count_ = 0;

  static constexpr double kTolFeas = 1e-9;
  static constexpr double kTolDual = 1e-9;
  static constexpr double kTolPivot = 1e-9;
  static constexpr long kRefreshEvery = 512;

  double col_tolf(int col) const;
  double bound_violation(int col) const;  // positive part beyond the bounds
  Vec reduced_costs(const Vec& cost) const;
  void ensure_dual_row();
  Vec phase1_costs() const;
  bool any_counted_infeasible() const;
  double total_infeasibility() const;
  void pivot(int row, int col);
  void recompute_basic_values();
  double bound_value(int col, ColStatus s) const {
    return s == ColStatus::at_lo ? lo_[static_cast<std::size_t>(col)]
                                 : hi_[static_cast<std::size_t>(col)];
  }
};

}  // namespace slowobs::detail
