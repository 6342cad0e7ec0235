#pragma once

#include <iosfwd>
#include <limits>

#include "slowobs/orbits.hpp"

namespace slowobs {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, ge, eq };

struct LpRow {
  Vec coeffs;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

struct FiniteLP {
  int num_vars = 0;
  Vec objective;
  bool maximize = true;
  std::vector<LpRow> rows;
  Vec lower, upper;  // per-variable; +-inf allowed; empty means all free
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
  LpStatus status = LpStatus::optimal;
  Vec x;
  double value = 0.0;
  Vec row_duals;
};

struct LpSolveError : Error {
  using Error::Error;
};

/// Dense bounded-variable simplex (two phases, Bland fallback after
/// 10*(rows+cols) iterations). Constraints hold to ~1e-9 at optimality.
LpSolution solve_finite_lp(const FiniteLP& lp);

/// argmin over [lo, hi] of A u^2 + B u, ties toward the smaller |u|.
double argmin_box_quadratic(double A, double B, double lo, double hi);

/// psi_i(z) = z^i, i = 1..N (k = 1).
struct MonomialBasisZ {
  int count = 0;
  explicit MonomialBasisZ(int n) : count(n) {
    if (n < 1) throw std::invalid_argument("MonomialBasisZ: need N >= 1");
  }
  double eval(int i, double z) const;   // z^(i+1), i zero-based
  double deriv(int i, double z) const;  // (i+1) z^i
};

/// phi(y) = y1^i1 y2^i2 with 0 <= i1, i2 <= degree, (i1, i2) != (0, 0);
/// degree 5 spans the 35-dimensional space (m = 2).
struct MonomialBasisY {
  struct Exponents {
    int i1 = 0, i2 = 0;
  };
  std::vector<Exponents> exps;

  static MonomialBasisY up_to_degree(int degree);
  int count() const { return static_cast<int>(exps.size()); }
  double eval(int j, const Vec& y) const;
  Vec grad(int j, const Vec& y) const;
};

/// One linearized inequality of the joint dual problem at a triple (z, u, y):
///   constant + lambda.lambda_coeffs + omega.omega_coeffs - t >= 0.
struct ConstraintRow {
  double t_coeff = -1.0;
  Vec lambda_coeffs;
  Vec omega_coeffs;
  double constant = 0.0;
};

ConstraintRow constraint_row(const ModelSpec& model, const MonomialBasisZ& basis_z,
                             const MonomialBasisY& basis_y, double z, const Vec& u,
                             const Vec& y, double z0, double discount);

/// The certificate: zeta coefficients, per-grid-node eta coefficients, and
/// the dual value a_{M,N}.
struct DualSolution {
  int basis_n = 0;
  MonomialBasisY basis_y;
  Vec lambda;
  Vec z_grid;
  std::vector<Vec> omega;  // one M-vector per grid node
  double value = 0.0;
  double max_violation = 0.0;
  bool converged = false;
  double z0 = 0.0;
  double discount = 0.0;

  double zeta(double z) const;
  double zeta_deriv(double z) const;
  int nearest_grid_index(double z) const;

  void save(std::ostream& os) const;
  static DualSolution load(std::istream& is);
};

struct ExchangeConfig {
  double tol = 1e-6;
  int max_iterations = 500;
  int control_grid = 33;
  // Safety box on the column-equilibrated (t, lambda, omega); in those units
  // it bounds the magnitude a single term may contribute to a row.
  double var_bound = 1e4;
  std::function<void(int iter, double value, double violation, int rows)> trace;
};

struct ExchangeError : Error {
  ExchangeError(const std::string& what, DualSolution best_so_far)
      : Error(what), best(std::move(best_so_far)) {}
  DualSolution best;
};

/// Joint finite-dimensional dual solve by constraint exchange over
/// (z-grid node, orbit node, control) triples. orbits[i] must live on
/// z_grid[i].
DualSolution solve_dual_exchange(const ProblemSpec& problem,
                                 const MonomialBasisZ& basis_z,
                                 const MonomialBasisY& basis_y, const Vec& z_grid,
                                 const std::vector<PeriodicOrbit>& orbits,
                                 const ExchangeConfig& cfg);

struct CertificateDiagnostics {
  Vec zeta_values;
  Vec zeta_derivs;
  bool monotone_decreasing = false;
};

CertificateDiagnostics certificate_diagnostics(const DualSolution& dual);

}  // namespace slowobs
