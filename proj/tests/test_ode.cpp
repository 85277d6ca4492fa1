#include <doctest.h>

#include <cmath>

#include "pwsim/errors.hpp"
#include "pwsim/ode.hpp"
#include "pwsim/piecewise.hpp"

using namespace pwsim;

namespace {
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("exponential growth matches the closed form") {
  ode::Field f = [](double, const Vec& y) { return Vec(y); };
  Vec y0(1);
  y0 << 1.0;
  auto res = ode::integrate_smooth(f, 0.0, y0, 1.0);
  CHECK(res.t.back() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(res.y.back()[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("dense output interpolates inside the step") {
  ode::Field f = [](double, const Vec& y) { return vec2(y[1], -y[0]); };
  ode::Dopri5 stepper(f);
  stepper.start(0.0, vec2(1.0, 0.0));
  ode::DenseOutput dense;
  double worst = 0.0;
  while (stepper.step_to(6.0, dense)) {
    for (double frac : {0.25, 0.5, 0.75}) {
      double t = dense.t0 + frac * dense.h;
      worst = std::max(worst, std::abs(dense(t)[0] - std::cos(t)));
    }
  }
  CHECK(worst < 1e-8);
  CHECK(stepper.t() == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("event stops the flow where the coordinate vanishes") {
  ode::Field f = [](double, const Vec& y) { return vec2(y[1], -y[0]); };
  ode::EventSpec ev;
  ev.g = [](double, const Vec& y) { return y[0]; };
  ev.direction = -1;
  auto res = ode::integrate_smooth(f, 0.0, vec2(1.0, 0.0), 10.0, {}, {ev});
  REQUIRE(res.event_hit);
  CHECK(res.event_index == 0);
  CHECK(res.t_event == doctest::Approx(M_PI / 2).epsilon(1e-10));
  CHECK(std::abs(res.y_event[0]) < 1e-10);
}

TEST_CASE("fixed step contracts with fifth-order scaling") {
  ode::Field f = [](double, const Vec& y) { return vec2(y[1], -y[0]); };
  auto march = [&](int n) {
    double h = 2.0 / n;
    Vec y = vec2(1.0, 0.0);
    for (int i = 0; i < n; ++i) y = ode::Dopri5::fixed_step(f, i * h, y, h);
    return y;
  };
  Vec exact = vec2(std::cos(2.0), -std::sin(2.0));
  double e1 = (march(20) - exact).norm();
  double e2 = (march(40) - exact).norm();
  CHECK(e1 / e2 > 16.0);
  CHECK(e1 / e2 < 64.0);
}

TEST_CASE("step budget exhaustion raises a numerics error") {
  ode::Field f = [](double, const Vec& y) { return Vec(y); };
  ode::Options opt;
  opt.max_steps = 3;
  Vec y0(1);
  y0 << 1.0;
  CHECK_THROWS_AS(ode::integrate_smooth(f, 0.0, y0, 50.0, opt),
                  NumericsError);
}

TEST_CASE("tightening tolerances tightens the answer") {
  ode::Field f = [](double t, const Vec& y) {
    return vec2(y[1], -std::sin(t) - 0.1 * y[1] - y[0]);
  };
  ode::Options loose, tight;
  loose.rtol = 1e-5;
  loose.atol = 1e-7;
  tight.rtol = 1e-12;
  tight.atol = 1e-14;
  auto rl = ode::integrate_smooth(f, 0.0, vec2(0.3, -0.2), 12.0, loose);
  auto rt = ode::integrate_smooth(f, 0.0, vec2(0.3, -0.2), 12.0, tight);
  CHECK((rl.y.back() - rt.y.back()).norm() < 1e-4);
  CHECK(rl.y.back() != rt.y.back());  // tolerances actually steer the work
}
