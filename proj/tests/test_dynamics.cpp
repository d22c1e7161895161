#include "fxtflow/dynamics.hpp"
#include "fxtflow/flows.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fxt;

namespace {

Objective half_square(int n) { return quadratic_objective(Matrix::Identity(n, n), Vector::Zero(n)); }

Vector scalar(double v) { return Vector::Constant(1, v); }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("linear decay matches the exponential") {
  const Objective o = half_square(1);
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_max = 1.0;
  cfg.stop_when_settled = false;
  const RhsFn rhs = [](const Vector& x, double, double) { return Vector(-x); };
  const Trajectory t = integrate(rhs, scalar(1.0), o, DisturbanceModel::none(), cfg);
  CHECK(t.final_time() == doctest::Approx(1.0));
  CHECK(std::abs(t.final_state()[0] - std::exp(-1.0)) <= 1e-3);
  CHECK_NOTHROW(t.validate());
}

TEST_CASE("sign flow settles at t = x0") {
  const Objective o = half_square(1);
  IntegratorConfig cfg;
  cfg.dt = 1e-4;
  cfg.t_max = 3.0;
  cfg.settle_tol = cfg.dt;
  const FlowSpec flow = first_order_flow(o, Protocol::signum());
  const Trajectory t = integrate(flow.rhs, scalar(2.0), o, DisturbanceModel::none(), cfg);
  REQUIRE(t.settling_time);
  CHECK(std::abs(*t.settling_time - 2.0) <= 2.0 * cfg.dt);
  CHECK(std::abs(t.final_state()[0]) <= cfg.dt);
}

TEST_CASE("start at the minimizer settles at zero") {
  const Objective o = half_square(2);
  IntegratorConfig cfg;
  const FlowSpec flow = first_order_flow(o, Protocol::rescaled(0.5, 2.0) + Protocol::power(2, 2));
  const Trajectory t = integrate(flow.rhs, Vector::Zero(2), o, DisturbanceModel::none(), cfg);
  REQUIRE(t.settling_time);
  CHECK(*t.settling_time == 0.0);
}

TEST_CASE("measure settling examples") {
  Trajectory t;
  t.times = {0.0, 0.1, 0.2};
  t.states = {scalar(1), scalar(0.5), scalar(0)};
  t.costs = {1, 1, 1};
  t.grad_norms = {1, 0.5, 1e-9};
  CHECK(*measure_settling(t, 1e-6) == doctest::Approx(0.2));
  t.grad_norms = {1, 0.5, 0.1};
  CHECK_FALSE(measure_settling(t, 1e-6).has_value());
  t.grad_norms = {1e-9, 1e-9, 1e-9};
  CHECK(*measure_settling(t, 1e-6) == 0.0);
}

TEST_CASE("settled_after requires staying below") {
  const std::vector<double> times = {0, 1, 2, 3, 4};
  CHECK(*settled_after(times, {5, 0.1, 5, 0.1, 0.1}, 1.0) == 3.0);
  CHECK_FALSE(settled_after(times, {5, 0.1, 0.1, 0.1, 5}, 1.0).has_value());
  CHECK(*settled_after(times, {0, 0, 0, 0, 0}, 1.0) == 0.0);
}

TEST_CASE("robust condition examples") {
  const auto d = DisturbanceModel::state_scaled_plus_bounded(1.0, 1.0);
  const auto c = robust_condition_check(3, 3, 2, d, 1.0, 1.0);
  CHECK(c.passed);
  CHECK(c.k1 == doctest::Approx(1.5));
  CHECK(c.k2 == doctest::Approx(2.5));
  CHECK(c.bound == doctest::Approx(1.0 / 1.5 + 1.0 / 2.5));

  const auto quiet = robust_condition_check(2, 5, 3, DisturbanceModel::none(), 2.0, 1.0);
  CHECK(quiet.k1 == 2.0);
  CHECK(quiet.k2 == 5.0);
  CHECK(quiet.bound == doctest::Approx(1.0 / 4.0 + 1.0 / 20.0));

  const auto fail = robust_condition_check(1, 3, 2, DisturbanceModel::state_scaled_plus_bounded(0, 1),
                                           1.0, 1.0);
  CHECK_FALSE(fail.passed);
  CHECK(fail.k1 == 0.0);
  CHECK(std::isinf(fail.bound));

  // k2 = 0 exactly: marginal, infinite bound
  const auto marg = robust_condition_check(3, 0.5, 2, DisturbanceModel::state_scaled_plus_bounded(1, 0),
                                           1.0, 1.0);
  CHECK(marg.marginal);
  CHECK(std::isinf(marg.bound));
}

TEST_CASE("disturbance envelope") {
  const Objective o = half_square(3);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5, 5);
  for (auto dir : {DisturbanceModel::Direction::Rotating, DisturbanceModel::Direction::Constant,
                   DisturbanceModel::Direction::AlongGradient, DisturbanceModel::Direction::Random}) {
    const auto d = DisturbanceModel::state_scaled_plus_bounded(0.7, 0.3, dir);
    for (int k = 0; k < 200; ++k) {
      Vector x(3);
      for (int i = 0; i < 3; ++i) x[i] = u(rng);
      const double t = u(rng) + 5;
      CHECK(d.eval(x, t, o, 9).norm() <= 0.7 * x.norm() + 0.3 + 1e-12);
    }
  }
  const auto s = DisturbanceModel::sinusoid(Vector::Constant(3, 0.2), 1.0);
  CHECK((s.eval(Vector::Zero(3), 0.5, o) - Vector::Constant(3, 0.2 * std::sin(0.5))).norm() < 1e-15);
}

TEST_CASE("integrator errors") {
  const Objective o = half_square(1);
  IntegratorConfig cfg;
  cfg.dt = 0.0;
  const RhsFn rhs = [](const Vector& x, double, double) { return Vector(-x); };
  CHECK_THROWS_AS(integrate(rhs, scalar(1), o, DisturbanceModel::none(), cfg), Error);

  IntegratorConfig ok;
  ok.dt = 0.1;
  ok.t_max = 100;
  const RhsFn blow = [](const Vector& x, double, double) { return Vector(x.array().square() + 1.0); };
  try {
    integrate(blow, scalar(1), o, DisturbanceModel::none(), ok);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() < 100.0);
    CHECK(e.kind() == ErrorKind::Divergence);
  }
}

TEST_CASE("stride recording keeps the final step") {
  const Objective o = half_square(1);
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_max = 1.0;
  cfg.record_stride = 30;
  cfg.stop_when_settled = false;
  const RhsFn rhs = [](const Vector& x, double, double) { return Vector(-x); };
  const Trajectory t = integrate(rhs, scalar(1), o, DisturbanceModel::none(), cfg);
  CHECK(t.final_time() == doctest::Approx(1.0));
  CHECK(t.size() == 5);  // 0, 0.3, 0.6, 0.9, 1.0
}

}  // TEST_SUITE
