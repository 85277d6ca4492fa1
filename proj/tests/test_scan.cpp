#include <doctest.h>

#include <cmath>

#include "pwsim/scan.hpp"

using namespace pwsim;
using namespace pwsim::scan;

TEST_CASE("attractor kinds across the switching family") {
  auto d = scan_nonsmooth({-0.04, 0.0, 0.04}, Budget{}, 2);
  REQUIRE(d.points.size() == 3);
  CHECK(d.points[0].eps == -0.04);
  CHECK(d.points[0].attractor == Attractor::PeriodicOrbit);
  REQUIRE(d.points[0].orbit_amplitude.has_value());
  CHECK(*d.points[0].orbit_amplitude == doctest::Approx(0.2658).epsilon(0.05));
  CHECK(d.points[1].attractor == Attractor::FocusPoint);
  CHECK(d.points[2].attractor == Attractor::SlidingPoint);
  REQUIRE(d.points[2].slide_lo.has_value());
  CHECK(*d.points[2].slide_lo == doctest::Approx(0.75 + 1.25 * 0.04));
  CHECK(*d.points[2].slide_hi == doctest::Approx(0.75 + 3.75 * 0.04));
  REQUIRE(d.bifurcations.size() == 1);
  CHECK(d.bifurcations[0].eps == 0.0);
}

TEST_CASE("grid is sorted and deduplicated") {
  auto d = scan_nonsmooth({0.03, -0.03, 0.03}, Budget{}, 1);
  REQUIRE(d.points.size() == 2);
  CHECK(d.points[0].eps == -0.03);
  CHECK(d.points[1].eps == 0.03);
}

TEST_CASE("smoothed family: stability flips at the measured crossing") {
  std::vector<double> grid = {-0.03, -0.02, -0.01, 0.0};
  auto d = scan_smooth({2e-3}, grid, 2);
  REQUIRE(d.points.size() == 4);
  CHECK(d.points[0].attractor == Attractor::PeriodicOrbit);
  CHECK(d.points[1].attractor == Attractor::PeriodicOrbit);
  CHECK(d.points[2].attractor == Attractor::EquilibriumPoint);
  CHECK(d.points[3].attractor == Attractor::EquilibriumPoint);
  REQUIRE(d.bifurcations.size() == 1);
  CHECK(d.bifurcations[0].kind == "smooth-hopf");
  CHECK(d.bifurcations[0].a == 2e-3);
  CHECK(d.bifurcations[0].eps ==
        doctest::Approx(-0.015321808475880737).epsilon(1e-6));
}

TEST_CASE("csv carries one row per point with stable formatting") {
  auto d = scan_nonsmooth({-0.02, 0.02}, Budget{}, 1);
  auto csv = to_csv(d);
  auto header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "a,eps,regime,attractor,orbit_amplitude,eigen_real,eigen_imag,"
        "slide_lo,slide_hi");
  int rows = 0;
  for (char c : csv)
    if (c == '\n') ++rows;
  CHECK(rows == 3);  // header + 2 points
  CHECK(to_csv(d) == csv);
}

TEST_CASE("thread count does not change the result bytes") {
  std::vector<double> grid = {-0.035, -0.01, 0.015, 0.04};
  auto one = scan_nonsmooth(grid, Budget{}, 1);
  auto four = scan_nonsmooth(grid, Budget{}, 4);
  CHECK(to_csv(one) == to_csv(four));
  CHECK(to_json_summary(one) == to_json_summary(four));
  auto s1 = scan_smooth({1e-3, 4e-3}, {-0.02, 0.0}, 1);
  auto s4 = scan_smooth({1e-3, 4e-3}, {-0.02, 0.0}, 4);
  CHECK(to_csv(s1) == to_csv(s4));
}
