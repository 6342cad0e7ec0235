#include <doctest.h>

#include <cmath>
#include <random>

#include "slowobs/models.hpp"

using namespace slowobs;

TEST_SUITE("models") {
  TEST_CASE("lotka-volterra fields at the published start point") {
    const ModelSpec m = ModelSpec::lotka_volterra_example2();
    const Fields fl = eval_fields(m, {0.3}, {0.8916, 3.1370});
    CHECK(fl.F[0] == doctest::Approx(-3.0).epsilon(1e-4));
    CHECK(fl.h[0] == doctest::Approx(0.3 * (0.8916 - 1.0)));
    CHECK(fl.g[0] == doctest::Approx(-0.3 * 0.8916));
    CHECK(fl.g[1] == 0.0);
    const double resid = fl.F[0] + 2.05;
    CHECK(fl.r == doctest::Approx(0.09 + resid * resid));
  }

  TEST_CASE("lotka-volterra equilibrium") {
    const ModelSpec m = ModelSpec::lotka_volterra_example2();
    const Fields fl = eval_fields(m, {0.7}, {1.0, 1.0});
    CHECK(fl.f[0] == 0.0);
    CHECK(fl.f[1] == 0.0);
    CHECK(fl.F[0] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(fl.h[0] == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("rotation fields") {
    const ModelSpec m = ModelSpec::rotation_example1();
    const Fields fl = eval_fields(m, {1.0}, {1.0, 0.0});
    CHECK(fl.f[0] == 0.0);
    CHECK(fl.f[1] == -1.0);
    CHECK(fl.F[0] == 1.0);
    const double cons = fl.F_jac[0] * fl.f[0] + fl.F_jac[1] * fl.f[1];
    CHECK(std::abs(cons) <= 1e-15);
  }

  TEST_CASE("constant of motion residual on random samples") {
    for (ModelKind kind :
         {ModelKind::rotation_example1, ModelKind::lotka_volterra_example2}) {
      const ModelSpec m = ModelSpec::builtin(kind);
      CHECK(check_constant_of_motion(m, 1000, 7) <= 1e-12);
    }
    CHECK_THROWS_AS(
        check_constant_of_motion(ModelSpec::rotation_example1(), 0, 7),
        std::invalid_argument);
  }

  TEST_CASE("h equals F_jac * g recomputed independently") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (ModelKind kind :
         {ModelKind::rotation_example1, ModelKind::lotka_volterra_example2}) {
      const ModelSpec m = ModelSpec::builtin(kind);
      for (int s = 0; s < 200; ++s) {
        Vec u{m.u_lo[0] + (m.u_hi[0] - m.u_lo[0]) * unit(rng)};
        Vec y{m.state_lo[0] + (m.state_hi[0] - m.state_lo[0]) * unit(rng),
              m.state_lo[1] + (m.state_hi[1] - m.state_lo[1]) * unit(rng)};
        const Fields fl = eval_fields(m, u, y);
        for (int i = 0; i < m.k; ++i) {
          double acc = 0.0;
          for (int j = 0; j < m.m; ++j)
            acc += fl.F_jac[static_cast<std::size_t>(i * m.m + j)] *
                   fl.g[static_cast<std::size_t>(j)];
          CHECK(std::abs(acc - fl.h[static_cast<std::size_t>(i)]) <= 1e-14);
        }
        if (kind == ModelKind::lotka_volterra_example2) CHECK(fl.r >= 0.0);
      }
    }
  }

  TEST_CASE("domain and contract errors") {
    const ModelSpec lv = ModelSpec::lotka_volterra_example2();
    CHECK_THROWS_AS(eval_fields(lv, {0.5}, {-0.1, 1.0}), DomainError);
    CHECK_THROWS_AS(eval_fields(lv, {1.5}, {1.0, 1.0}), std::invalid_argument);
    const ModelSpec rot = ModelSpec::rotation_example1();
    CHECK_THROWS_AS(eval_fields(rot, {-2.0}, {1.0, 0.0}), std::invalid_argument);
  }

  TEST_CASE("control-affine decomposition matches eval_fields") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (ModelKind kind :
         {ModelKind::rotation_example1, ModelKind::lotka_volterra_example2}) {
      const ModelSpec m = ModelSpec::builtin(kind);
      for (int s = 0; s < 100; ++s) {
        const double u = m.u_lo[0] + (m.u_hi[0] - m.u_lo[0]) * unit(rng);
        Vec y{m.state_lo[0] + (m.state_hi[0] - m.state_lo[0]) * unit(rng),
              m.state_lo[1] + (m.state_hi[1] - m.state_lo[1]) * unit(rng)};
        const Fields fl = eval_fields(m, {u}, y);
        const ControlAffine ca = control_affine_at(m, y);
        CHECK(fl.r ==
              doctest::Approx(ca.r2 * u * u + ca.r1 * u + ca.r0).epsilon(1e-12));
        CHECK(fl.h[0] ==
              doctest::Approx(ca.h1[0] * u + ca.h0[0]).epsilon(1e-12));
        for (int i = 0; i < 2; ++i)
          CHECK(fl.f[static_cast<std::size_t>(i)] ==
                doctest::Approx(ca.f1[static_cast<std::size_t>(i)] * u +
                                ca.f0[static_cast<std::size_t>(i)])
                    .epsilon(1e-12));
      }
    }
  }

  TEST_CASE("problem validation") {
    ProblemSpec p;
    p.model = ModelSpec::lotka_volterra_example2();
    p.y0 = {0.8916, 3.1370};
    p.z0 = observable(p.model, p.y0);
    p.z_lo = {-3.0};
    p.z_hi = {-2.05};
    CHECK_NOTHROW(p.validate());

    ProblemSpec bad = p;
    bad.z0 = {-2.9};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = p;
    bad.z_lo = {-2.0};  // z0 far outside the box
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = p;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }
}
