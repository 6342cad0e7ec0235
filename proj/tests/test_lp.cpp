#include <doctest.h>

#include <cmath>
#include <random>

#include "simplex_engine.hpp"
#include "slowobs/lp.hpp"

using namespace slowobs;

namespace {

// Brute-force oracle: enumerate all choices of n active constraints among
// rows and finite variable bounds, solve the square system, keep the best
// feasible vertex.
bool solve_square(std::vector<Vec> A, Vec b, Vec& x) {
  const std::size_t n = b.size();
  x.assign(n, 0.0);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (std::abs(A[piv][col]) < 1e-9) return false;
    std::swap(A[piv], A[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return true;
}

double brute_force_max(const FiniteLP& lp) {
  const std::size_t n = static_cast<std::size_t>(lp.num_vars);
  std::vector<Vec> normals;
  Vec offsets;
  for (const LpRow& r : lp.rows) {
    normals.push_back(r.coeffs);
    offsets.push_back(r.rhs);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(lp.lower[j])) {
      Vec e(n, 0.0);
      e[j] = 1.0;
      normals.push_back(e);
      offsets.push_back(lp.lower[j]);
    }
    if (std::isfinite(lp.upper[j])) {
      Vec e(n, 0.0);
      e[j] = 1.0;
      normals.push_back(e);
      offsets.push_back(lp.upper[j]);
    }
  }
  const std::size_t total = normals.size();
  const auto feasible = [&](const Vec& x) {
    for (const LpRow& r : lp.rows) {
      const double ax = dot(r.coeffs, x);
      if (r.sense == Sense::le && ax > r.rhs + 1e-7) return false;
      if (r.sense == Sense::ge && ax < r.rhs - 1e-7) return false;
      if (r.sense == Sense::eq && std::abs(ax - r.rhs) > 1e-7) return false;
    }
    for (std::size_t j = 0; j < n; ++j)
      if (x[j] < lp.lower[j] - 1e-7 || x[j] > lp.upper[j] + 1e-7) return false;
    return true;
  };

  double best = -kInf;
  std::vector<std::size_t> pick(n);
  const auto recurse = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (depth == n) {
      std::vector<Vec> A;
      Vec b;
      for (std::size_t i = 0; i < n; ++i) {
        A.push_back(normals[pick[i]]);
        b.push_back(offsets[pick[i]]);
      }
      Vec x;
      if (!solve_square(A, b, x)) return;
      if (!feasible(x)) return;
      best = std::max(best, dot(lp.objective, x));
      return;
    }
    for (std::size_t i = start; i < total; ++i) {
      pick[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

FiniteLP random_instance(std::mt19937_64& rng, bool with_eq) {
  std::uniform_int_distribution<int> nd(2, 5), md(3, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  FiniteLP lp;
  lp.num_vars = nd(rng);
  const std::size_t n = static_cast<std::size_t>(lp.num_vars);
  const int m = md(rng);
  lp.maximize = true;
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, 10.0);
  lp.objective.resize(n);
  for (double& c : lp.objective) c = 2.0 * unit(rng) - 1.0;
  Vec x0(n);
  for (double& v : x0) v = 2.0 * unit(rng);
  for (int i = 0; i < m; ++i) {
    LpRow row;
    row.coeffs.resize(n);
    for (double& a : row.coeffs) a = 2.0 * unit(rng) - 1.0;
    const double ax = dot(row.coeffs, x0);
    if (with_eq && i == 0) {
      row.sense = Sense::eq;
      row.rhs = ax;
    } else if (unit(rng) < 0.3) {
      row.sense = Sense::ge;
      row.rhs = ax - unit(rng);
    } else {
      row.sense = Sense::le;
      row.rhs = ax + unit(rng);
    }
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

}  // namespace

TEST_SUITE("lp") {
  TEST_CASE("one variable box") {
    FiniteLP lp;
    lp.num_vars = 1;
    lp.objective = {1.0};
    lp.lower = {0.0};
    lp.upper = {kInf};
    lp.rows.push_back({{1.0}, Sense::le, 1.0});
    const LpSolution s = solve_finite_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("two variables, value 3 at (1,2)") {
    FiniteLP lp;
    lp.num_vars = 2;
    lp.objective = {1.0, 1.0};
    lp.lower = {0.0, 0.0};
    lp.upper = {kInf, kInf};
    lp.rows.push_back({{1.0, 0.0}, Sense::le, 1.0});
    lp.rows.push_back({{0.0, 1.0}, Sense::le, 2.0});
    const LpSolution s = solve_finite_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(s.x[0] == doctest::Approx(1.0));
    CHECK(s.x[1] == doctest::Approx(2.0));
  }

  TEST_CASE("unbounded and infeasible flags") {
    FiniteLP lp;
    lp.num_vars = 1;
    lp.objective = {1.0};
    lp.lower = {-kInf};
    lp.upper = {kInf};
    CHECK(solve_finite_lp(lp).status == LpStatus::unbounded);

    lp.lower = {0.0};
    lp.rows.push_back({{1.0}, Sense::le, -1.0});
    CHECK(solve_finite_lp(lp).status == LpStatus::infeasible);
  }

  TEST_CASE("minimization and equality rows") {
    // min x + y  s.t.  x + y = 2, x in [0,5], y in [0,5]
    FiniteLP lp;
    lp.num_vars = 2;
    lp.maximize = false;
    lp.objective = {1.0, 1.0};
    lp.lower = {0.0, 0.0};
    lp.upper = {5.0, 5.0};
    lp.rows.push_back({{1.0, 1.0}, Sense::eq, 2.0});
    const LpSolution s = solve_finite_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("free variables") {
    // max t s.t. t - x <= 1, t + x <= 1, x free, t free -> t = 1 at x = 0
    FiniteLP lp;
    lp.num_vars = 2;
    lp.objective = {1.0, 0.0};
    lp.lower = {-kInf, -kInf};
    lp.upper = {kInf, kInf};
    lp.rows.push_back({{1.0, -1.0}, Sense::le, 1.0});
    lp.rows.push_back({{1.0, 1.0}, Sense::le, 1.0});
    const LpSolution s = solve_finite_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.value == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("matches vertex enumeration on 100 seeded instances") {
    int solved = 0;
    for (unsigned seed = 1; seed <= 100; ++seed) {
      std::mt19937_64 rng(seed);
      const FiniteLP lp = random_instance(rng, false);
      const LpSolution s = solve_finite_lp(lp);
      const double oracle = brute_force_max(lp);
      REQUIRE(s.status == LpStatus::optimal);
      REQUIRE(std::isfinite(oracle));
      CHECK(s.value == doctest::Approx(oracle).epsilon(1e-7));
      ++solved;
    }
    CHECK(solved == 100);
  }

  TEST_CASE("equality rows against the oracle") {
    for (unsigned seed = 200; seed < 220; ++seed) {
      std::mt19937_64 rng(seed);
      const FiniteLP lp = random_instance(rng, true);
      const LpSolution s = solve_finite_lp(lp);
      const double oracle = brute_force_max(lp);
      REQUIRE(s.status == LpStatus::optimal);
      CHECK(s.value == doctest::Approx(oracle).epsilon(1e-7));
    }
  }

  TEST_CASE("constraint residuals and complementary slackness") {
    for (unsigned seed = 300; seed < 330; ++seed) {
      std::mt19937_64 rng(seed);
      const FiniteLP lp = random_instance(rng, false);
      const LpSolution s = solve_finite_lp(lp);
      REQUIRE(s.status == LpStatus::optimal);
      for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        const double ax = dot(lp.rows[i].coeffs, s.x);
        const double slack = lp.rows[i].rhs - ax;
        if (lp.rows[i].sense == Sense::le) CHECK(slack >= -1e-9);
        if (lp.rows[i].sense == Sense::ge) CHECK(slack <= 1e-9);
        CHECK(std::abs(s.row_duals[i] * slack) <= 1e-8 * (1.0 + std::abs(ax)));
      }
    }
  }

  TEST_CASE("incremental rows match a fresh solve") {
    for (unsigned seed = 400; seed < 440; ++seed) {
      std::mt19937_64 rng(seed);
      FiniteLP lp = random_instance(rng, false);
      const LpSolution base = solve_finite_lp(lp);
      REQUIRE(base.status == LpStatus::optimal);

      detail::SimplexEngine eng;
      eng.init(lp.num_vars, lp.lower, lp.upper);
      eng.set_objective(lp.objective);
      for (const LpRow& r : lp.rows) eng.add_row(r.coeffs, r.sense, r.rhs);
      REQUIRE(eng.primal_solve() == LpStatus::optimal);

      // a cut violated at the current optimum
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      LpRow cut;
      cut.coeffs.resize(static_cast<std::size_t>(lp.num_vars));
      for (double& a : cut.coeffs) a = 2.0 * unit(rng) - 1.0;
      cut.sense = Sense::le;
      cut.rhs = dot(cut.coeffs, base.x) - 0.5;
      eng.add_row(cut.coeffs, cut.sense, cut.rhs);
      LpStatus st;
      try {
        st = eng.dual_reoptimize();
      } catch (const LpSolveError&) {
        st = eng.primal_solve();
      }
      lp.rows.push_back(cut);
      const LpSolution fresh = solve_finite_lp(lp);
      REQUIRE(st == fresh.status);
      if (st == LpStatus::optimal) {
        CHECK(eng.objective_value() ==
              doctest::Approx(fresh.value).epsilon(1e-8));
        CHECK(eng.max_primal_residual() <= 1e-8);
      }
    }
  }

  TEST_CASE("argmin_box_quadratic") {
    CHECK(argmin_box_quadratic(1.0, -1.0, 0.0, 1.0) == doctest::Approx(0.5));
    CHECK(argmin_box_quadratic(1.0, 10.0, 0.0, 1.0) == doctest::Approx(0.0));
    CHECK(argmin_box_quadratic(1.0, -10.0, 0.0, 1.0) == doctest::Approx(1.0));
    // positive scaling of (A, B) never moves the argmin: exact for powers of
    // two, within an ulp otherwise
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> exp2d(-8, 8);
    for (int i = 0; i < 500; ++i) {
      const double A = 0.1 + unit(rng);
      const double B = 4.0 * unit(rng) - 2.0;
      const double u = argmin_box_quadratic(A, B, 0.0, 1.0);
      const double p2 = std::ldexp(1.0, exp2d(rng));
      CHECK(u == argmin_box_quadratic(p2 * A, p2 * B, 0.0, 1.0));
      const double s = 0.01 + 10.0 * unit(rng);
      CHECK(argmin_box_quadratic(s * A, s * B, 0.0, 1.0) ==
            doctest::Approx(u).epsilon(1e-14));
    }
  }
}
