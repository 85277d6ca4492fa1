#include <doctest.h>

#include <cmath>
#include <random>

#include "pwsim/welander.hpp"

using namespace pwsim;
using namespace pwsim::welander;

namespace {
Params eps_only(double eps) {
  Params p;
  p.epsilon = eps;
  return p;
}
}  // namespace

TEST_CASE("grazing abscissae follow the affine law in eps") {
  for (double eps : {-0.05, -0.01, 0.0, 0.02, 0.05}) {
    auto sb = sliding_boundaries(eps_only(eps));
    CHECK(sb.x_k0 == doctest::Approx(0.75 + 1.25 * eps).epsilon(1e-14));
    CHECK(sb.x_k1 == doctest::Approx(0.75 + 3.75 * eps).epsilon(1e-14));
  }
}

TEST_CASE("sliding rest point at the fused grazing value") {
  auto pe = pseudoequilibrium(eps_only(0.0));
  REQUIRE(pe.has_value());
  CHECK(std::abs(pe->x - 0.75) <= 1e-10);
  CHECK(std::abs(pe->k - 1.0 / 3.0) <= 1e-10);
}

TEST_CASE("sliding rest point tracks eps") {
  auto p1 = pseudoequilibrium(eps_only(0.01));
  REQUIRE(p1.has_value());
  CHECK(p1->k == doctest::Approx(0.2987538457040333).epsilon(1e-12));
  auto p2 = pseudoequilibrium(eps_only(0.1));
  REQUIRE(p2.has_value());
  CHECK(p2->k == doctest::Approx(0.10849528301415086).epsilon(1e-12));
  // the mixing ratio stays admissible inside the existence window
  CHECK(p1->k > 0.0);
  CHECK(p1->k < 1.0);
}

TEST_CASE("sliding rest point disappears outside its window") {
  CHECK_FALSE(pseudoequilibrium(eps_only(-0.07)).has_value());
  CHECK_FALSE(pseudoequilibrium(eps_only(0.21)).has_value());
  CHECK(pseudoequilibrium(eps_only(-0.06)).has_value());
  CHECK(pseudoequilibrium(eps_only(0.19)).has_value());
}

TEST_CASE("coordinate change round-trips") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-0.5, 1.5);
  auto p = eps_only(0.017);
  for (int i = 0; i < 50; ++i) {
    Eigen::Vector2d TS(U(rng), U(rng));
    Eigen::Vector2d back = from_xy(to_xy(TS, p), p);
    CHECK((back - TS).norm() < 1e-14);
  }
}

TEST_CASE("switch normal coordinate vanishes exactly on the threshold") {
  auto p = eps_only(0.02);
  Eigen::Vector2d TS(0.9, 0.6);
  Eigen::Vector2d xy = to_xy(TS, p);
  CHECK(xy[1] == doctest::Approx(density_excess(TS, p) - p.epsilon));
}

TEST_CASE("sigmoid switch approaches the step switch pointwise") {
  auto H = k_heaviside(0.3, eps_only(0.1));
  REQUIRE(H.defined);
  CHECK(H.value == 1.0);
  for (double a : {1e-2, 1e-4, 1e-6}) {
    Params p = eps_only(0.1);
    p.a = a;
    CHECK(std::abs(k_smooth(0.3, p) - 1.0) < 2.0 * a / (M_PI * 0.2));
  }
  auto mid = k_heaviside(0.1, eps_only(0.1));
  CHECK_FALSE(mid.defined);  // exactly on the threshold the step has no value
}

TEST_CASE("both smooth-region rest points are virtual near the fused point") {
  for (double eps : {-0.05, 0.0, 0.1, 0.19}) {
    auto re = region_equilibria(eps_only(eps));
    CHECK(re.k0.is_virtual);
    CHECK(re.k1.is_virtual);
  }
  // outside the window the mixing-on rest point becomes real: h > 0 puts it
  // on its own side of the threshold
  auto re = region_equilibria(eps_only(-0.1));
  CHECK(re.k0.h > 0.0);
  CHECK(re.k0.is_virtual);
  CHECK(re.k1.h > 0.0);
  CHECK_FALSE(re.k1.is_virtual);
}

TEST_CASE("region rest points solve their own frozen-switch dynamics") {
  auto p = eps_only(0.03);
  auto re = region_equilibria(p);
  CHECK(vector_field_TS(re.k0.TS, 0.0, p).norm() < 1e-14);
  CHECK(vector_field_TS(re.k1.TS, 1.0, p).norm() < 1e-14);
}

TEST_CASE("normal-velocity gap between the two switch states is -eps") {
  for (double eps : {-0.2, -0.03, 0.0, 0.07}) {
    auto p = eps_only(eps);
    for (double x : {0.2, 0.75, 1.3}) {
      Eigen::Vector2d z(x, 0.0);
      double gap =
          (vector_field_xy(z, 1.0, p) - vector_field_xy(z, 0.0, p))[1];
      CHECK(gap == doctest::Approx(-eps).epsilon(1e-15));
    }
  }
}
