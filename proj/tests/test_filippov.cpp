#include <doctest.h>

#include <cmath>

#include "pwsim/errors.hpp"
#include "pwsim/piecewise.hpp"
#include "pwsim/welander.hpp"

using namespace pwsim;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Opposing normal components: the manifold attracts from both sides.
PiecewiseSystem attracting_manifold() {
  PiecewiseSystem sys;
  sys.dim = 2;
  sys.f_plus = [](const Vec&) { return vec2(1.0, -1.0); };
  sys.f_minus = [](const Vec&) { return vec2(1.0, 1.0); };
  sys.h = [](const Vec& x) { return x[1]; };
  sys.grad_h = [](const Vec&) { return vec2(0.0, 1.0); };
  sys.domain = Box::unbounded(2);
  return sys;
}

}  // namespace

TEST_CASE("convex combination hits both endpoint fields") {
  auto sys = attracting_manifold();
  Vec x = vec2(0.3, 0.0);
  CHECK((eval_field(sys, x, 0.0) - sys.f_minus(x)).norm() == 0.0);
  CHECK((eval_field(sys, x, 1.0) - sys.f_plus(x)).norm() == 0.0);
  CHECK(eval_field(sys, x, 0.5)[1] == doctest::Approx(0.0));
}

TEST_CASE("attracting manifold classifies as stable sliding") {
  auto sys = attracting_manifold();
  auto bc = classify_boundary(sys, vec2(0.0, 0.0));
  CHECK(bc.kind == BoundaryKind::StableSliding);
  REQUIRE(bc.lambda_star.has_value());
  CHECK(*bc.lambda_star == doctest::Approx(0.5));
  CHECK(bc.dS_dlambda == doctest::Approx(-2.0));
  Vec w = sliding_flow(sys, vec2(0.0, 0.0));
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(std::abs(w[1]) < 1e-14);
}

TEST_CASE("same-sign normal components classify as crossing") {
  auto sys = attracting_manifold();
  sys.f_minus = [](const Vec&) { return vec2(1.0, -0.5); };  // both descend
  auto bc = classify_boundary(sys, vec2(0.0, 0.0));
  CHECK(bc.kind == BoundaryKind::Crossing);
  CHECK_FALSE(sliding_lambda(sys, vec2(0.0, 0.0)).has_value());
}

TEST_CASE("vanishing normal component flags a tangency") {
  auto sys = attracting_manifold();
  sys.f_plus = [](const Vec& x) { return vec2(1.0, x[0]); };
  auto bc = classify_boundary(sys, vec2(0.0, 0.0));
  CHECK(bc.kind == BoundaryKind::Tangency);
  CHECK(bc.tangent_plus);
  CHECK_FALSE(bc.tangent_minus);
}

TEST_CASE("grazing points on the switching line are found and invisible") {
  for (double eps : {0.03, -0.03}) {
    welander::Params p;
    p.epsilon = eps;
    auto sys = welander::make_filippov_xy(p);
    ManifoldChart chart;
    chart.embed = [](double u) { return vec2(u, 0.0); };
    chart.u_lo = 0.3;
    chart.u_hi = 1.2;
    auto tps = find_tangencies(sys, chart, 64);
    REQUIRE(tps.size() == 2);
    for (const auto& tp : tps) {
      CHECK(tp.visibility == TangencyVisibility::Invisible);
      double want = tp.side == TangencySide::Plus ? 0.75 + 3.75 * eps
                                                  : 0.75 + 1.25 * eps;
      CHECK(tp.location[0] == doctest::Approx(want).epsilon(1e-10));
    }
  }
}

TEST_CASE("box search agrees with the chart search") {
  welander::Params p;
  p.epsilon = 0.02;
  auto sys = welander::make_filippov_xy(p);
  Box box;
  box.lo = vec2(0.3, -0.4);
  box.hi = vec2(1.2, 0.4);
  auto tps = find_tangencies(sys, box, 64);
  REQUIRE(tps.size() == 2);
  double lo = std::min(tps[0].location[0], tps[1].location[0]);
  double hi = std::max(tps[0].location[0], tps[1].location[0]);
  CHECK(lo == doctest::Approx(0.75 + 1.25 * 0.02).epsilon(1e-8));
  CHECK(hi == doctest::Approx(0.75 + 3.75 * 0.02).epsilon(1e-8));
}

TEST_CASE("sliding flow is rejected outside the sliding segment") {
  welander::Params p;
  p.epsilon = 0.03;
  auto sys = welander::make_filippov_xy(p);
  CHECK_THROWS_AS(sliding_flow(sys, vec2(0.3, 0.0)), NotInSlidingRegion);
}
