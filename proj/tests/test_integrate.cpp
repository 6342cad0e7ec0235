#include <doctest.h>

#include <cmath>

#include "slowobs/integrate.hpp"

using namespace slowobs;

namespace {

const double kPi = std::acos(-1.0);

double max_observable_drift(const Trajectory& traj) {
  double worst = 0.0;
  const double z0 = traj.observables.front()[0];
  for (const Vec& z : traj.observables) worst = std::max(worst, std::abs(z[0] - z0));
  return worst;
}

}  // namespace

TEST_SUITE("integrate") {
  TEST_CASE("rotation closes after one period") {
    const ModelSpec m = ModelSpec::rotation_example1();
    IntegratorConfig cfg;
    const Trajectory t =
        integrate_reduced(m, Vec{1.0}, {1.0, 0.0}, 2.0 * kPi, cfg);
    CHECK(dist(t.states.back(), {1.0, 0.0}) <= 1e-6);
  }

  TEST_CASE("lotka-volterra equilibrium is a fixed point") {
    const ModelSpec m = ModelSpec::lotka_volterra_example2();
    IntegratorConfig cfg;
    const Trajectory t = integrate_reduced(m, Vec{0.8}, {1.0, 1.0}, 10.0, cfg);
    CHECK(t.states.back()[0] == 1.0);
    CHECK(t.states.back()[1] == 1.0);
  }

  TEST_CASE("reduced flow conserves F over long horizons") {
    IntegratorConfig cfg;
    cfg.record_stride = 10;
    const ModelSpec lv = ModelSpec::lotka_volterra_example2();
    const Trajectory t1 =
        integrate_reduced(lv, Vec{0.4}, {0.8916, 3.1370}, 50.0, cfg);
    CHECK(max_observable_drift(t1) <= 1e-7);
    CHECK(t1.running_cost.back() >= 0.0);
    for (std::size_t i = 1; i < t1.running_cost.size(); ++i)
      CHECK(t1.running_cost[i] >= t1.running_cost[i - 1]);

    const ModelSpec rot = ModelSpec::rotation_example1();
    const Trajectory t2 = integrate_reduced(
        rot, [](double tau) { return Vec{std::cos(tau) >= 0.0 ? 1.0 : -0.5}; },
        {2.0, 1.0}, 50.0, cfg);
    CHECK(max_observable_drift(t2) <= 1e-6);
  }

  TEST_CASE("fourth-order step halving") {
    const ModelSpec m = ModelSpec::rotation_example1();
    const Vec y0{1.0, 0.0};
    const double T = 2.0;
    const Vec exact{std::cos(T), -std::sin(T)};
    IntegratorConfig coarse, fine;
    coarse.dt = 0.02;
    fine.dt = 0.01;
    const double e1 =
        dist(integrate_reduced(m, Vec{1.0}, y0, T, coarse).states.back(), exact);
    const double e2 =
        dist(integrate_reduced(m, Vec{1.0}, y0, T, fine).states.back(), exact);
    CHECK(e1 / e2 >= 8.0);
  }

  TEST_CASE("perturbed flow with zero control conserves F") {
    ProblemSpec p;
    p.model = ModelSpec::lotka_volterra_example2();
    p.epsilon = 0.1;
    p.y0 = {0.8916, 3.1370};
    p.z0 = observable(p.model, p.y0);
    p.z_lo = {-3.0};
    p.z_hi = {-2.05};
    IntegratorConfig cfg;
    cfg.record_stride = 10;
    const Trajectory t = integrate_perturbed(
        p, [](double, const Vec&) { return Vec{0.0}; }, 1.0, cfg);
    CHECK(max_observable_drift(t) <= 1e-6);
  }

  TEST_CASE("observable increments track the integral of h") {
    ProblemSpec p;
    p.model = ModelSpec::lotka_volterra_example2();
    p.epsilon = 0.1;
    p.y0 = {0.8916, 3.1370};
    p.z0 = observable(p.model, p.y0);
    p.z_lo = {-3.5};
    p.z_hi = {-2.05};
    IntegratorConfig cfg;  // stride 1: the quadrature needs every sample
    const Trajectory t = integrate_perturbed(
        p, [](double, const Vec&) { return Vec{1.0}; }, 1.0, cfg);
    // trapezoid of h(u, y) dt along the trajectory vs F(y(t)) - F(y0)
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
      const double h0 =
          eval_fields(p.model, t.controls[i], t.states[i]).h[0];
      const double h1 =
          eval_fields(p.model, t.controls[i], t.states[i + 1]).h[0];
      acc += 0.5 * (t.times[i + 1] - t.times[i]) * (h0 + h1);
    }
    const double dz = t.observables.back()[0] - t.observables.front()[0];
    CHECK(std::abs(dz - acc) <= 1e-4);
    CHECK(std::abs(dz) > 1e-3);  // the control really moves the observable
  }

  TEST_CASE("policy outside the control box is rejected") {
    ProblemSpec p;
    p.model = ModelSpec::lotka_volterra_example2();
    p.epsilon = 0.1;
    p.y0 = {0.8916, 3.1370};
    p.z0 = observable(p.model, p.y0);
    p.z_lo = {-3.0};
    p.z_hi = {-2.05};
    IntegratorConfig cfg;
    CHECK_THROWS_AS(integrate_perturbed(
                        p, [](double, const Vec&) { return Vec{1.5}; }, 0.1, cfg),
                    std::invalid_argument);
  }

  TEST_CASE("discounted cost closed forms") {
    Trajectory t;
    const double c = 0.7, C = 1.0, T = 5.0;
    const int n = 50001;
    for (int i = 0; i < n; ++i) {
      t.times.push_back(T * i / (n - 1));
      t.states.push_back({0.0, 0.0});
      t.controls.push_back({0.0});
      t.observables.push_back({0.0});
      t.running_cost.push_back(0.0);
      t.r_instant.push_back(c);
    }
    const DiscountedCost dc = discounted_cost(t, C, c);
    CHECK(std::abs(dc.value - c / C * (1.0 - std::exp(-C * T))) <= 1e-8);
    CHECK(dc.tail_bound == doctest::Approx(2.0 / C * c * std::exp(-C * T)));

    for (double& r : t.r_instant) r = 0.0;
    const DiscountedCost zero = discounted_cost(t, C, 0.0);
    CHECK(zero.value == 0.0);
    CHECK(zero.tail_bound == 0.0);
  }

  TEST_CASE("event refinement") {
    // linear event over a linear segment
    const auto ev_linear = [](const Vec& y) { return y[0] - 1.0; };
    const EventCrossing a = refine_event_crossing(
        0.5, {0.5}, {1.0}, 1.5, {1.5}, {1.0}, ev_linear, 1e-10);
    CHECK(a.t == doctest::Approx(1.0).epsilon(1e-9));

    // circle flow, event y2 = 0 crossed at tau = pi
    const auto state = [](double tau) { return Vec{std::cos(tau), -std::sin(tau)}; };
    const auto deriv = [](double tau) { return Vec{-std::sin(tau), -std::cos(tau)}; };
    const double t0 = 3.141, t1 = 3.142;
    const EventCrossing b = refine_event_crossing(
        t0, state(t0), deriv(t0), t1, state(t1), deriv(t1),
        [](const Vec& y) { return y[1]; }, 1e-12);
    CHECK(std::abs(b.t - kPi) <= 1e-8);

    CHECK_THROWS_AS(refine_event_crossing(0.0, {1.0}, {0.0}, 1.0, {2.0}, {0.0},
                                          [](const Vec& y) { return y[0]; },
                                          1e-10),
                    std::invalid_argument);
  }

  TEST_CASE("observables are recomputable from states") {
    const ModelSpec m = ModelSpec::lotka_volterra_example2();
    IntegratorConfig cfg;
    cfg.record_stride = 7;
    const Trajectory t =
        integrate_reduced(m, Vec{0.2}, {0.8916, 3.1370}, 5.0, cfg);
    for (std::size_t i = 0; i < t.size(); ++i)
      CHECK(std::abs(observable(m, t.states[i])[0] - t.observables[i][0]) <=
            1e-12);
    for (std::size_t i = 1; i < t.size(); ++i)
      CHECK(t.times[i] > t.times[i - 1]);
  }
}
