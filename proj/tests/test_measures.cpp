#include <doctest.h>

#include <cmath>
#include <random>

#include "slowobs/measures.hpp"

using namespace slowobs;

TEST_SUITE("measures") {
  TEST_CASE("constant policy gives uniform atoms") {
    const ModelSpec m = ModelSpec::lotka_volterra_example2();
    const PeriodicOrbit orbit = orbit_for_level(m, {-2.6}, OrbitConfig{});
    const OccupationalMeasure mu = occupational_from_policy(
        m, orbit, [](const Vec&, const Vec&) { return Vec{0.4}; });
    CHECK(mu.atoms.size() == orbit.nodes.size());
    double total = 0.0;
    for (const Atom& a : mu.atoms) {
      CHECK(a.weight == doctest::Approx(1.0 / orbit.nodes.size()));
      CHECK(a.u[0] == 0.4);
      total += a.weight;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
    for (const Atom& a : mu.atoms)
      CHECK(std::abs(observable(m, a.y)[0] - mu.level[0]) <= 1e-6);
  }

  TEST_CASE("bang-zero policy splits on y1 = 1") {
    const ModelSpec m = ModelSpec::lotka_volterra_example2();
    const PeriodicOrbit orbit = orbit_for_level(m, {-3.0}, OrbitConfig{});
    // the synthesized form with zeta' = -1
    const auto policy = [&](const Vec& y, const Vec&) {
      return Vec{std::min(std::max(0.5 * (y[0] - 1.0), 0.0), 1.0)};
    };
    const OccupationalMeasure mu = occupational_from_policy(m, orbit, policy);
    for (const Atom& a : mu.atoms) {
      if (a.y[0] <= 1.0)
        CHECK(a.u[0] == 0.0);
      else
        CHECK(a.u[0] > 0.0);
    }
  }

  TEST_CASE("contract violations") {
    const ModelSpec m = ModelSpec::lotka_volterra_example2();
    PeriodicOrbit empty;
    CHECK_THROWS_AS(occupational_from_policy(
                        m, empty, [](const Vec&, const Vec&) { return Vec{0.0}; }),
                    std::invalid_argument);
    const PeriodicOrbit orbit = orbit_for_level(m, {-2.6}, OrbitConfig{});
    CHECK_THROWS_AS(occupational_from_policy(
                        m, orbit, [](const Vec&, const Vec&) { return Vec{1.4}; }),
                    std::invalid_argument);
  }

  TEST_CASE("mean functionals") {
    const ModelSpec lv = ModelSpec::lotka_volterra_example2();
    const PeriodicOrbit orbit = orbit_for_level(lv, {-2.7}, OrbitConfig{});

    // constant controls cannot move the observable on average
    const OccupationalMeasure mu_const = occupational_from_policy(
        lv, orbit, [](const Vec&, const Vec&) { return Vec{0.6}; });
    const MeanFunctionals mf = mean_functionals(lv, mu_const);
    CHECK(std::abs(mf.h_bar[0]) <= 1e-4);

    // zero control: the running cost is constant on the level set
    const OccupationalMeasure mu_zero = occupational_from_policy(
        lv, orbit, [](const Vec&, const Vec&) { return Vec{0.0}; });
    const double expect = (-2.7 + 2.05) * (-2.7 + 2.05);
    CHECK(mean_functionals(lv, mu_zero).r_bar ==
          doctest::Approx(expect).epsilon(1e-6));

    const ModelSpec rot = ModelSpec::rotation_example1();
    const PeriodicOrbit circle = orbit_for_level(rot, {2.0}, OrbitConfig{});
    const OccupationalMeasure mu_one = occupational_from_policy(
        rot, circle, [](const Vec&, const Vec&) { return Vec{1.0}; });
    const MeanFunctionals mf_rot = mean_functionals(rot, mu_one);
    CHECK(mf_rot.r_bar == doctest::Approx(1.0));
    CHECK(mf_rot.h_bar[0] == 0.0);
  }

  TEST_CASE("functionals are linear in the measure") {
    const ModelSpec m = ModelSpec::lotka_volterra_example2();
    const PeriodicOrbit orbit = orbit_for_level(m, {-2.5}, OrbitConfig{});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto random_measure = [&]() {
      OccupationalMeasure mu;
      mu.level = orbit.level;
      for (const Vec& y : orbit.nodes)
        mu.atoms.push_back(Atom{1.0 / orbit.nodes.size(), Vec{unit(rng)}, y});
      return mu;
    };
    const OccupationalMeasure a = random_measure();
    const OccupationalMeasure b = random_measure();
    OccupationalMeasure mix;
    mix.level = orbit.level;
    for (const Atom& at : a.atoms)
      mix.atoms.push_back(Atom{0.5 * at.weight, at.u, at.y});
    for (const Atom& at : b.atoms)
      mix.atoms.push_back(Atom{0.5 * at.weight, at.u, at.y});
    const MeanFunctionals fa = mean_functionals(m, a);
    const MeanFunctionals fb = mean_functionals(m, b);
    const MeanFunctionals fm = mean_functionals(m, mix);
    CHECK(std::abs(fm.r_bar - 0.5 * (fa.r_bar + fb.r_bar)) <= 1e-12);
    CHECK(std::abs(fm.h_bar[0] - 0.5 * (fa.h_bar[0] + fb.h_bar[0])) <= 1e-12);
  }
}
