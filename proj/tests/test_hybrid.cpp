#include <doctest.h>

#include <cmath>
#include <string>

#include "pwsim/hybrid.hpp"
#include "pwsim/welander.hpp"

using namespace pwsim;

namespace {
Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
welander::Params eps_only(double eps) {
  welander::Params p;
  p.epsilon = eps;
  return p;
}
}  // namespace

TEST_CASE("trajectory alternates sides through transversal crossings") {
  auto sys = welander::make_filippov_xy(eps_only(-0.04));
  auto run = integrate(sys, vec2(0.95, 0.1), 0.0, 10.0);
  CHECK(run.termination == Termination::TimeLimit);
  REQUIRE(run.segments.size() >= 3);
  for (std::size_t i = 1; i < run.segments.size(); ++i) {
    auto a = run.segments[i - 1].mode;
    auto b = run.segments[i].mode;
    CHECK(a != b);  // a crossing must actually change the active field
    CHECK(b != Mode::Sliding);
  }
  int crossings = 0;
  for (const auto& ev : run.events)
    if (ev.kind == EventKind::CrossingIn || ev.kind == EventKind::CrossingOut)
      ++crossings;
  CHECK(crossings >= 2);
}

TEST_CASE("attracting segment captures the orbit and holds it") {
  auto sys = welander::make_filippov_xy(eps_only(0.04));
  auto run = integrate(sys, vec2(0.5, 0.2), 0.0, 60.0);
  CHECK(run.termination == Termination::TimeLimit);
  REQUIRE(!run.segments.empty());
  CHECK(run.segments.back().mode == Mode::Sliding);
  CHECK(run.segments.back().entry.kind == EventKind::SlideEntry);
  // while sliding the state stays pinned to the manifold
  for (const auto& x : run.segments.back().x) CHECK(std::abs(x[1]) < 1e-9);
  // and converges toward the sliding rest point
  auto pe = welander::pseudoequilibrium(eps_only(0.04));
  REQUIRE(pe.has_value());
  CHECK(std::abs(run.x_end[0] - pe->x) < 1e-6);
}

TEST_CASE("fused grazing point chatters without sliding") {
  auto sys = welander::make_filippov_xy(eps_only(0.0));
  IntegrationOptions opts;
  opts.max_steps = 50000;
  auto run = integrate(sys, vec2(0.8, 0.05), 0.0, 400.0, opts);
  // crossings keep firing forever; the run must stop on a guard, never slide
  CHECK((run.termination == Termination::ZenoSuspected ||
         run.termination == Termination::StepBudget));
  CHECK(run.n_events() > 10000);
  for (const auto& seg : run.segments) CHECK(seg.mode != Mode::Sliding);
  CHECK(std::abs(run.x_end[0] - 0.75) < 0.05);
  CHECK(std::abs(run.x_end[1]) < 0.05);
}

TEST_CASE("section callback records directed hits without stopping") {
  auto sys = welander::make_filippov_xy(eps_only(-0.04));
  auto sec = welander::section_xy();
  IntegrationOptions opts;
  opts.section = SectionSpec{sec.g, +1, false};
  auto run = integrate(sys, vec2(0.95, 0.1), 0.0, 40.0, opts);
  CHECK(run.termination == Termination::TimeLimit);
  int hits = 0;
  for (const auto& ev : run.events)
    if (ev.kind == EventKind::SectionHit) {
      ++hits;
      CHECK(std::abs(ev.x[1]) < 1e-9);
    }
  CHECK(hits >= 5);
}

TEST_CASE("stopping section ends the run on first directed hit") {
  auto sys = welander::make_filippov_xy(eps_only(-0.04));
  auto sec = welander::section_xy();
  IntegrationOptions opts;
  opts.section = SectionSpec{sec.g, +1, true};
  auto run = integrate(sys, vec2(0.95, 0.1), 0.0, 40.0, opts);
  CHECK(run.termination == Termination::SectionStop);
  CHECK(run.t_end < 40.0);
  CHECK(std::abs(run.x_end[1]) < 1e-9);
}

TEST_CASE("csv serialization is stable across identical runs") {
  auto sys = welander::make_filippov_xy(eps_only(-0.02));
  auto r1 = integrate(sys, vec2(0.9, 0.05), 0.0, 15.0);
  auto r2 = integrate(sys, vec2(0.9, 0.05), 0.0, 15.0);
  std::string c1 = to_csv(r1), c2 = to_csv(r2);
  CHECK(c1 == c2);
  CHECK(c1.substr(0, c1.find('\n')) == "t,x0,x1,mode,segment");
  std::string e1 = events_csv(r1);
  CHECK(e1 == events_csv(r2));
  CHECK(e1.substr(0, e1.find('\n')) == "t,kind,x0,x1");
}

TEST_CASE("uniform sampling honors the requested spacing") {
  auto sys = welander::make_filippov_xy(eps_only(-0.02));
  IntegrationOptions opts;
  opts.sample_dt = 0.25;
  auto run = integrate(sys, vec2(0.9, 0.05), 0.0, 10.0, opts);
  for (const auto& seg : run.segments) {
    for (std::size_t i = 2; i + 1 < seg.t.size(); ++i) {
      double gap = seg.t[i] - seg.t[i - 1];
      CHECK(gap <= 0.25 + 1e-9);
    }
  }
}
