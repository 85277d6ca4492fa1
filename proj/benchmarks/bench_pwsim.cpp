#include <benchmark/benchmark.h>

#include "pwsim/blowup.hpp"
#include "pwsim/hybrid.hpp"
#include "pwsim/piecewise.hpp"
#include "pwsim/section.hpp"
#include "pwsim/welander.hpp"

using namespace pwsim;

namespace {

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

welander::Params params(double a, double eps) {
  welander::Params p;
  p.a = a;
  p.epsilon = eps;
  return p;
}

void bm_integrate_switching(benchmark::State& state) {
  auto sys = welander::make_filippov_xy(params(0.0, -0.02));
  for (auto _ : state) {
    auto run = integrate(sys, vec2(0.9, 0.05), 0.0, 20.0);
    benchmark::DoNotOptimize(run.x_end);
  }
}
BENCHMARK(bm_integrate_switching)->Unit(benchmark::kMillisecond);

void bm_integrate_sliding(benchmark::State& state) {
  auto sys = welander::make_filippov_xy(params(0.0, 0.04));
  for (auto _ : state) {
    auto run = integrate(sys, vec2(0.5, 0.2), 0.0, 20.0);
    benchmark::DoNotOptimize(run.x_end);
  }
}
BENCHMARK(bm_integrate_sliding)->Unit(benchmark::kMillisecond);

void bm_integrate_smoothed(benchmark::State& state) {
  auto f = welander::smooth_field_xy(params(1e-3, -0.02));
  for (auto _ : state) {
    auto res = ode::integrate_smooth(
        [&f](double, const Vec& y) { return f(y); }, 0.0, vec2(0.9, 0.05),
        20.0);
    benchmark::DoNotOptimize(res.y.back());
  }
}
BENCHMARK(bm_integrate_smoothed)->Unit(benchmark::kMillisecond);

void bm_classify_boundary(benchmark::State& state) {
  auto sys = welander::make_filippov_xy(params(0.0, 0.03));
  Vec x = vec2(0.8, 0.0);
  for (auto _ : state) {
    auto bc = classify_boundary(sys, x);
    benchmark::DoNotOptimize(bc.kind);
  }
}
BENCHMARK(bm_classify_boundary);

void bm_smooth_equilibrium(benchmark::State& state) {
  auto p = params(1e-3, -0.005);
  for (auto _ : state) {
    auto eq = blowup::smooth_equilibrium(p);
    benchmark::DoNotOptimize(eq.x);
  }
}
BENCHMARK(bm_smooth_equilibrium);

void bm_numeric_jacobian(benchmark::State& state) {
  auto p = params(1e-3, -0.005);
  auto eq = blowup::smooth_equilibrium(p);
  Vec xk = vec2(eq.x, eq.k);
  for (auto _ : state) {
    auto J = blowup::numeric_jacobian(xk, p);
    benchmark::DoNotOptimize(J(0, 0));
  }
}
BENCHMARK(bm_numeric_jacobian);

void bm_limit_cycle_switching(benchmark::State& state) {
  auto sys = welander::make_filippov_xy(params(0.0, -0.04));
  for (auto _ : state) {
    auto orbit = find_limit_cycle(sys, welander::section_xy(), 0.72, 1.05);
    benchmark::DoNotOptimize(orbit.section_point);
  }
}
BENCHMARK(bm_limit_cycle_switching)->Unit(benchmark::kMillisecond);

void bm_expansion_verify(benchmark::State& state) {
  for (auto _ : state) {
    auto le = blowup::local_expansion(true);
    benchmark::DoNotOptimize(le.f2_eps);
  }
}
BENCHMARK(bm_expansion_verify)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
