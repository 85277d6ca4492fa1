#include <doctest.h>

#include <cmath>

#include "pwsim/blowup.hpp"
#include "pwsim/errors.hpp"
#include "pwsim/welander.hpp"

using namespace pwsim;
using namespace pwsim::blowup;

namespace {
welander::Params make_params(double a, double eps) {
  welander::Params p;
  p.a = a;
  p.epsilon = eps;
  return p;
}
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("compactification round-trips and guards its domain") {
  for (double z : {-50.0, -1.0, 0.0, 0.3, 40.0})
    CHECK(phi_inv(phi(z)) == doctest::Approx(z).epsilon(1e-12));
  CHECK(phi(0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(phi_inv(1.5), DomainError);
  CHECK_THROWS_AS(phi_inv(0.0), DomainError);
}

TEST_CASE("the rescaled fields need a positive layer width") {
  CHECK_THROWS_AS(blowup_field(vec2(0.75, 0.4), make_params(0.0, 0.0)),
                  DomainError);
  CHECK_THROWS_AS(blowup_field(vec2(0.75, 1.0 - 1e-9), make_params(1e-3, 0.0)),
                  DomainError);
  // the fast-time field is defined in the singular limit a = 0
  Vec f = fast_field(vec2(0.75, 1.0 / 3.0), make_params(0.0, 0.0));
  CHECK(std::abs(f[0]) < 1e-14);
  CHECK(std::abs(f[1]) < 1e-14);
}

TEST_CASE("expansion coefficients survive independent differentiation") {
  auto le = local_expansion(true);  // throws if any coefficient mismatches
  double worst = 0.0;
  for (const auto& c : le.checks) worst = std::max(worst, c.error);
  CHECK(worst < 1e-6);
  CHECK(le.f1_a_xi == doctest::Approx(-4.0 / 3.0));
  CHECK(le.f1_a_psi == doctest::Approx(-0.75));
  CHECK(le.f2_eps == doctest::Approx(-5.0 / (8.0 * M_PI)));
  CHECK(le.f2_a == doctest::Approx(5.0 / (8.0 * M_PI * std::sqrt(3.0))));
  CHECK(le.f2_xi == doctest::Approx(3.0 / (10.0 * M_PI)));
  CHECK(le.f2_a_psi ==
        doctest::Approx(std::sqrt(3.0) / (4.0 * M_PI) - 5.0 / 12.0));
  CHECK(le.f2_eps_psi ==
        doctest::Approx(-(5.0 / (4.0 * std::sqrt(3.0)) + 3.0 / (4.0 * M_PI))));
  CHECK(le.f2_xi_psi == doctest::Approx(std::sqrt(3.0) / 5.0));
}

TEST_CASE("closed-form jacobian matches its own trace and discriminant") {
  double a = 2e-3, eps = -1e-3;
  auto J = jacobian(a, eps);
  CHECK(J.trace() == doctest::Approx(trace(a, eps)).epsilon(1e-14));
  double tr = J.trace(), det = J.determinant();
  CHECK(tr * tr - 4.0 * det ==
        doctest::Approx(discriminant(a, eps)).epsilon(1e-12));
  CHECK(discriminant(a, eps) < 0.0);  // focus regime near the organizing point
}

TEST_CASE("trace line: the slope reproduces the zero of the trace") {
  double rho = hopf_slope();
  double a = 3e-3;
  CHECK(trace(a, hopf_line(a)) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(hopf_line(a) == doctest::Approx(rho * a));
  CHECK(rho < 0.0);
}

TEST_CASE("equilibrium of the smoothed layer approaches the sliding rest point") {
  auto pe = welander::pseudoequilibrium([] {
    welander::Params p;
    p.epsilon = 0.02;
    return p;
  }());
  REQUIRE(pe.has_value());
  double prev = 1e9;
  for (double a : {1e-2, 1e-3, 1e-4}) {
    auto eq = smooth_equilibrium(make_params(a, 0.02));
    double d = std::hypot(eq.x - pe->x, eq.k - pe->k);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 5e-4);
}

TEST_CASE("eigenvalue crossing exists for small layer widths") {
  // regression anchor: at a = 0.002 the leading real part changes sign
  auto rec = verify_hopf_numerically(2e-3, -0.05, 0.01, 41, false);
  REQUIRE(rec.eps_star.has_value());
  CHECK(*rec.eps_star == doctest::Approx(-0.015321808475880737).epsilon(1e-6));
  CHECK(rec.stable_above);
  CHECK(rec.unstable_below);
  CHECK(rec.dre_deps < 0.0);
}

TEST_CASE("no eigenvalue crossing at moderate layer widths") {
  // at a = 0.01 the equilibrium stays stable over the whole window; the
  // scan must say so rather than invent a crossing
  CHECK_THROWS_AS(verify_hopf_numerically(1e-2, -0.12, 0.02, 41, false),
                  NotFound);
  auto rec = hopf_scan(1e-2, -0.12, 0.02, 41, false);
  CHECK_FALSE(rec.eps_star.has_value());
  CHECK(rec.max_re_seen < 0.0);
}

TEST_CASE("orbit amplitudes grow like a square root past the crossing") {
  auto rec = verify_hopf_numerically(2e-3, -0.05, 0.01, 41, true);
  REQUIRE(rec.amplitude_slope.has_value());
  CHECK(*rec.amplitude_slope > 0.45);
  CHECK(*rec.amplitude_slope < 0.55);
  CHECK(rec.amplitudes.size() >= 4);
}
