#include <doctest.h>

#include <cmath>

#include "pwsim/errors.hpp"
#include "pwsim/section.hpp"
#include "pwsim/welander.hpp"

using namespace pwsim;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Planar field with an attracting unit circle.
VectorField radial_cycle() {
  return [](const Vec& x) {
    double r2 = x[0] * x[0] + x[1] * x[1];
    return vec2(x[1] + x[0] * (1.0 - r2), -x[0] + x[1] * (1.0 - r2));
  };
}

Section positive_x_axis() {
  Section sec;
  sec.g = [](const Vec& x) { return x[1]; };
  sec.direction = -1;  // the rotation crosses y=0 downward at x>0
  sec.param = [](const Vec& x) { return x[0]; };
  sec.embed = [](double s) { return vec2(s, 0.0); };
  return sec;
}

}  // namespace

TEST_CASE("smooth return map contracts onto the circular orbit") {
  auto sec = positive_x_axis();
  auto r = poincare_return_smooth(radial_cycle(), sec, 0.5, 50.0);
  CHECK(r.t_return == doctest::Approx(2.0 * M_PI).epsilon(1e-3));
  CHECK(r.s_next > 0.5);
  CHECK(r.s_next < 1.0);
  double s = 0.5;
  for (int i = 0; i < 8; ++i)
    s = poincare_map_smooth(radial_cycle(), sec, s, 50.0);
  CHECK(s == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("limit cycle search lands on the circle with contraction") {
  auto orbit =
      find_limit_cycle_smooth(radial_cycle(), positive_x_axis(), 0.4, 1.7);
  CHECK(orbit.section_point == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(orbit.period == doctest::Approx(2.0 * M_PI).epsilon(1e-6));
  CHECK(orbit.floquet < 1.0);
  CHECK(orbit.stability == OrbitStability::Stable);
  CHECK(orbit.amplitude == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("missing return is reported, not fabricated") {
  // constant drift: orbits leave the section and never come back
  VectorField runaway = [](const Vec&) { return vec2(1.0, 1.0); };
  Section sec;
  sec.g = [](const Vec& x) { return x[1]; };
  sec.direction = +1;
  sec.param = [](const Vec& x) { return x[0]; };
  sec.embed = [](double s) { return vec2(s, 0.0); };
  CHECK_THROWS_AS(poincare_return_smooth(runaway, sec, 0.5, 3.0), NoReturn);
}

TEST_CASE("switching limit cycle: fixed point, period and stability") {
  welander::Params p;
  p.epsilon = -0.04;
  auto sys = welander::make_filippov_xy(p);
  auto orbit = find_limit_cycle(sys, welander::section_xy(), 0.72, 1.05);
  CHECK(orbit.section_point == doctest::Approx(0.8048).epsilon(2e-3));
  CHECK(orbit.floquet < 0.2);
  CHECK(orbit.stability == OrbitStability::Stable);
  CHECK(orbit.amplitude == doctest::Approx(0.2658).epsilon(2e-2));
  CHECK(orbit.period > 0.0);
  // the periodic point reproduces itself through the return map
  auto r = poincare_return(sys, welander::section_xy(), orbit.section_point,
                           200.0);
  CHECK(std::abs(r.s_next - orbit.section_point) < 1e-7);
}

TEST_CASE("bad bracket is rejected") {
  welander::Params p;
  p.epsilon = -0.04;
  auto sys = welander::make_filippov_xy(p);
  // both endpoints sit on the same side of the fixed point
  CHECK_THROWS_AS(find_limit_cycle(sys, welander::section_xy(), 0.95, 1.05),
                  NumericsError);
}
