#include <doctest.h>

#include "pwsim/selfcheck.hpp"

// Every module-level invariant, exercised with at least 200 random cases per
// suite from deterministic per-suite generators.
TEST_SUITE("properties") {

TEST_CASE("randomized invariant suites") {
  auto results = pwsim::check::property_suites();
  CHECK(results.size() >= 24);
  for (const auto& r : results) {
    INFO(r.name, ": ", r.detail);
    CHECK(r.pass);
  }
}

}  // TEST_SUITE("properties")
