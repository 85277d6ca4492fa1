#include "pwsim/selfcheck.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <utility>

#include "pwsim/blowup.hpp"
#include "pwsim/config.hpp"
#include "pwsim/errors.hpp"
#include "pwsim/hybrid.hpp"
#include "pwsim/piecewise.hpp"
#include "pwsim/rootfind.hpp"
#include "pwsim/scan.hpp"
#include "pwsim/section.hpp"
#include "pwsim/svg.hpp"
#include "pwsim/welander.hpp"

namespace pwsim::check {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct Draw {
  std::mt19937_64 rng;
  explicit Draw(unsigned long s) : rng(s) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  double sign() { return (rng() & 1) ? 1.0 : -1.0; }
};

// Body returns "" on pass, a failure message otherwise.
Result run_suite(const std::string& name,
                 const std::function<std::string()>& body) {
  Timer tm;
  Result r;
  r.name = name;
  try {
    std::string err = body();
    r.pass = err.empty();
    r.detail = err.empty() ? "ok" : err;
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = tm.elapsed();
  return r;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Values of a smooth field's flow on a fixed, increasing time grid
// (grid.front() is the start time) via dense output.
std::vector<Vec> sample_on_grid(const VectorField& f, const Vec& x0,
                                const std::vector<double>& grid,
                                const ode::Options& opt) {
  ode::Dopri5 stepper([f](double, const Vec& y) { return f(y); }, opt);
  stepper.start(grid.front(), x0);
  std::vector<Vec> out;
  out.reserve(grid.size());
  out.push_back(x0);
  std::size_t j = 1;
  ode::DenseOutput dense;
  while (j < grid.size()) {
    if (!stepper.step_to(grid.back(), dense)) break;
    while (j < grid.size() && grid[j] <= dense.t1() + 1e-14) {
      out.push_back(dense(std::min(grid[j], dense.t1())));
      ++j;
    }
  }
  while (j < grid.size()) {
    out.push_back(stepper.y());
    ++j;
  }
  return out;
}

welander::Params params_eps(double eps) {
  welander::Params p;
  p.epsilon = eps;
  return p;
}

welander::Params params_a_eps(double a, double eps) {
  welander::Params p;
  p.a = a;
  p.epsilon = eps;
  return p;
}

ManifoldChart xy_manifold_chart(double u_lo, double u_hi) {
  ManifoldChart chart;
  chart.embed = [](double u) { return vec2(u, 0.0); };
  chart.u_lo = u_lo;
  chart.u_hi = u_hi;
  return chart;
}

// ---------------------------------------------------------------------
// Acceptance criteria
// ---------------------------------------------------------------------

std::pair<bool, std::string> c1_sliding_boundaries() {
  double worst = 0.0;
  for (int i = 1; i <= 5; ++i) {
    for (double sgn : {1.0, -1.0}) {
      double eps = sgn * 0.01 * i;
      auto sys = welander::make_filippov_xy(params_eps(eps));
      auto tps = find_tangencies(sys, xy_manifold_chart(0.3, 1.2), 64);
      if (tps.size() != 2)
        return {false, "eps=" + fmt(eps) + ": expected 2 tangencies, found " +
                           std::to_string(tps.size())};
      double x_minus = 0.75 + 1.25 * eps;  // k = 0 field grazes here
      double x_plus = 0.75 + 3.75 * eps;   // k = 1 field grazes here
      for (const auto& tp : tps) {
        double want = tp.side == TangencySide::Plus ? x_plus : x_minus;
        worst = std::max(worst, std::abs(tp.location[0] - want));
      }
    }
  }
  return {worst <= 1e-8, "max abscissa error " + fmt(worst)};
}

std::pair<bool, std::string> c2_sliding_stability() {
  Draw d(90210);
  double worst = 0.0;
  for (int n = 0; n < 200; ++n) {
    double eps = d.sign() * d.uniform(1e-4, 0.05);
    auto sys = welander::make_filippov_xy(params_eps(eps));
    double u = d.uniform(0.2, 1.3);
    auto bc = classify_boundary(sys, vec2(u, 0.0));
    double scale = 8.0 * 2.220446049250313e-16 *
                   (1.0 + std::abs(bc.s_plus) + std::abs(bc.s_minus));
    double err = std::abs(bc.dS_dlambda + eps);
    worst = std::max(worst, err - scale);
    if (err > scale)
      return {false, "eps=" + fmt(eps) + ": dS/dlambda off by " + fmt(err)};
  }
  for (double eps : {0.03, -0.03}) {
    double mid = 0.75 + 2.5 * eps;
    auto sys = welander::make_filippov_xy(params_eps(eps));
    auto bc = classify_boundary(sys, vec2(mid, 0.0));
    BoundaryKind want =
        eps > 0 ? BoundaryKind::StableSliding : BoundaryKind::UnstableSliding;
    if (bc.kind != want)
      return {false, "stability did not flip across eps=0 (eps=" + fmt(eps) +
                         ")"};
  }
  return {true, "dS/dlambda = -eps to rounding; stability flips at eps=0"};
}

std::pair<bool, std::string> c3_fused_focus_regimes() {
  std::string detail;
  {  // eps > 0: trajectories end in stable sliding
    auto sys = welander::make_filippov_xy(params_eps(0.04));
    auto run = integrate(sys, vec2(0.5, 0.2), 0.0, 60.0);
    bool slid = run.termination == Termination::TimeLimit &&
                !run.segments.empty() &&
                run.segments.back().mode == Mode::Sliding;
    if (!slid) return {false, "eps=+0.04 run did not settle into sliding"};
    detail += "eps=+0.04 slides (x_end=" + fmt(run.x_end[0]) + "); ";
  }
  {  // eps = 0: crossings contract toward (3/4, 0)
    auto sys = welander::make_filippov_xy(params_eps(0.0));
    auto sec = welander::section_xy();
    IntegrationOptions opts;
    opts.section = SectionSpec{sec.g, +1, false};
    auto run = integrate(sys, vec2(0.8, 0.05), 0.0, 20.0, opts);
    std::vector<double> dist;
    for (const auto& ev : run.events)
      if (ev.kind == EventKind::SectionHit)
        dist.push_back(std::abs(ev.x[0] - 0.75));
    if (dist.size() < 11)
      return {false, "eps=0: only " + std::to_string(dist.size()) +
                         " return-map iterates recorded"};
    double rmax = 0.0;
    for (int i = 0; i < 10; ++i) {
      double r = dist[i + 1] / dist[i];
      rmax = std::max(rmax, r);
      if (!(r < 1.0))
        return {false, "eps=0: contraction ratio " + fmt(r) + " at iterate " +
                           std::to_string(i)};
    }
    detail += "eps=0 contracts (max ratio " + fmt(rmax) + "); ";
  }
  {  // eps < 0: attracting crossing limit cycle
    auto sys = welander::make_filippov_xy(params_eps(-0.04));
    CycleOptions copt;
    copt.root_tol = 1e-8;
    auto orbit =
        find_limit_cycle(sys, welander::section_xy(), 0.72, 1.05, copt);
    if (!(orbit.floquet < 1.0))
      return {false, "eps=-0.04: return-map slope " + fmt(orbit.floquet) +
                         " is not contracting"};
    detail += "eps=-0.04 cycle x*=" + fmt(orbit.section_point) +
              " amp=" + fmt(orbit.amplitude) +
              " slope=" + fmt(orbit.floquet);
  }
  return {true, detail};
}

std::pair<bool, std::string> c4_pseudoequilibrium() {
  auto pe = welander::pseudoequilibrium(params_eps(0.0));
  if (!pe) return {false, "no sliding rest point found at eps=0"};
  double err =
      std::max(std::abs(pe->x - 0.75), std::abs(pe->k - 1.0 / 3.0));
  return {err <= 1e-10, "(x,k)=(" + fmt(pe->x) + "," + fmt(pe->k) +
                            "), error " + fmt(err)};
}

std::pair<bool, std::string> c5_expansion_oracle() {
  auto le = blowup::local_expansion(true);  // throws when any check misses
  double worst = 0.0;
  for (const auto& c : le.checks) worst = std::max(worst, c.error);
  return {worst <= 1e-6, std::to_string(le.checks.size()) +
                             " coefficients vs finite differences, max error " +
                             fmt(worst)};
}

std::pair<bool, std::string> c6_chart_conjugacy() {
  std::vector<double> grid;
  for (int j = 0; j <= 200; ++j) grid.push_back(0.05 * j);
  ode::Options tight;
  tight.rtol = 1e-11;
  tight.atol = 1e-13;
  double worst = 0.0;
  for (double a : {1e-2, 1e-3}) {
    for (double eps : {0.02, -0.02}) {
      auto p = params_a_eps(a, eps);
      auto xy = sample_on_grid(welander::smooth_field_xy(p), vec2(0.6, 0.05),
                               grid, tight);
      auto bk = sample_on_grid(blowup::blowup_field_fn(p),
                               vec2(0.6, blowup::phi(0.05 / a)), grid, tight);
      double sup = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        sup = std::max(sup, std::abs(xy[j][0] - bk[j][0]));
        sup = std::max(sup, std::abs(blowup::phi(xy[j][1] / a) - bk[j][1]));
      }
      worst = std::max(worst, sup);
      if (sup > 1e-6)
        return {false, "a=" + fmt(a) + " eps=" + fmt(eps) +
                           ": sup distance " + fmt(sup)};
    }
  }
  return {true, "4 trajectory pairs agree; worst sup distance " + fmt(worst)};
}

std::pair<bool, std::string> c7_hopf_line_limit() {
  double rho = blowup::hopf_slope();
  std::string detail = "trace-line slope " + fmt(rho) + "; ";
  bool ok = true;
  std::vector<double> stars;
  for (double a : {0.02, 0.01, 0.005}) {
    try {
      auto rec = blowup::verify_hopf_numerically(a, -0.12, 0.02, 41, false);
      double ratio = *rec.eps_star / a;
      bool close = std::abs(ratio - rho) <= 0.1 * std::abs(rho);
      ok = ok && close;
      stars.push_back(*rec.eps_star);
      detail += "a=" + fmt(a) + ": eps*=" + fmt(*rec.eps_star) +
                " ratio=" + fmt(ratio) + (close ? "" : " (off the line)") +
                "; ";
    } catch (const NotFound& e) {
      ok = false;
      detail += std::string("a=") + fmt(a) + ": " + e.what() + "; ";
    }
  }
  if (stars.size() == 3)
    for (int i = 0; i + 1 < 3; ++i)
      if (!(std::abs(stars[i]) > std::abs(stars[i + 1]))) {
        ok = false;
        detail += "|eps*| not monotone in a; ";
      }
  return {ok, detail};
}

std::pair<bool, std::string> c8_supercriticality() {
  try {
    auto rec = blowup::verify_hopf_numerically(0.01, -0.12, 0.02, 41, true);
    if (!rec.amplitude_slope)
      return {false, "eps*=" + fmt(*rec.eps_star) +
                         " but no amplitude fit was possible"};
    double slope = *rec.amplitude_slope;
    return {std::abs(slope - 0.5) <= 0.1,
            "amplitude growth exponent " + fmt(slope) + " from " +
                std::to_string(rec.amplitudes.size()) + " orbits"};
  } catch (const NotFound& e) {
    return {false, e.what()};
  }
}

std::pair<bool, std::string> c9_equilibrium_perturbation() {
  std::string detail;
  for (double eps : {0.02, -0.02}) {
    auto pe = welander::pseudoequilibrium(params_eps(eps));
    if (!pe) return {false, "pseudoequilibrium missing at eps=" + fmt(eps)};
    std::vector<double> dist;
    for (double a : {1e-2, 1e-3, 1e-4}) {
      auto eq = blowup::smooth_equilibrium(params_a_eps(a, eps));
      dist.push_back(std::hypot(eq.x - pe->x, eq.k - pe->k));
    }
    for (int i = 0; i + 1 < 3; ++i) {
      double ratio = dist[i] / dist[i + 1];
      if (!(ratio > 5.0 && ratio < 20.0))
        return {false, "eps=" + fmt(eps) + ": distance ratio " + fmt(ratio) +
                           " is not O(a) scaling"};
      detail += "eps=" + fmt(eps) + " ratio=" + fmt(ratio) + "; ";
    }
  }
  return {true, detail};
}

std::pair<bool, std::string> c10_invariant_suites() {
  auto suites = property_suites(20260815, 200);
  int failed = 0;
  std::string detail;
  for (const auto& s : suites)
    if (!s.pass) {
      ++failed;
      detail += s.name + ": " + s.detail + "; ";
    }
  if (failed == 0)
    return {true, std::to_string(suites.size()) + " suites passed"};
  return {false, std::to_string(failed) + "/" +
                     std::to_string(suites.size()) + " suites failed: " +
                     detail};
}

struct CriterionSpec {
  const char* name;
  double limit_seconds;
  std::pair<bool, std::string> (*body)();
};

const CriterionSpec kCriteria[10] = {
    {"sliding-boundaries", 1.0, c1_sliding_boundaries},
    {"sliding-stability", 1.0, c2_sliding_stability},
    {"fused-focus-regimes", 30.0, c3_fused_focus_regimes},
    {"pseudoequilibrium", 1.0, c4_pseudoequilibrium},
    {"taylor-coefficient-oracle", 5.0, c5_expansion_oracle},
    {"chart-conjugacy", 30.0, c6_chart_conjugacy},
    {"hopf-line-limit", 120.0, c7_hopf_line_limit},
    {"supercriticality", 120.0, c8_supercriticality},
    {"equilibrium-perturbation", 10.0, c9_equilibrium_perturbation},
    {"invariant-suites", 120.0, c10_invariant_suites},
};

}  // namespace

Result criterion(int index) {
  if (index < 1 || index > 10)
    throw ConfigError("criterion index must be in 1..10, got " +
                      std::to_string(index));
  const auto& spec = kCriteria[index - 1];
  Timer tm;
  Result r;
  r.name = spec.name;
  try {
    auto [ok, detail] = spec.body();
    r.pass = ok;
    r.detail = detail;
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = tm.elapsed();
  if (r.seconds >= spec.limit_seconds) {
    r.pass = false;
    r.detail += " [over the " + fmt(spec.limit_seconds) + "s budget]";
  }
  return r;
}

std::vector<Result> all_criteria() {
  std::vector<Result> out;
  for (int i = 1; i <= 10; ++i) out.push_back(criterion(i));
  return out;
}

// ---------------------------------------------------------------------
// Property suites
// ---------------------------------------------------------------------

namespace {

std::string suite_endpoint_consistency(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    auto sys = welander::make_filippov_xy(params_eps(d.uniform(-0.05, 0.05)));
    Vec x = vec2(d.uniform(0.0, 1.5), d.uniform(-0.5, 0.5));
    Vec e0 = eval_field(sys, x, 0.0) - sys.f_minus(x);
    Vec e1 = eval_field(sys, x, 1.0) - sys.f_plus(x);
    double tol = 4e-16 * (1.0 + sys.f_plus(x).norm() + sys.f_minus(x).norm());
    if (e0.norm() > tol || e1.norm() > tol)
      return "endpoint mismatch " + fmt(std::max(e0.norm(), e1.norm())) +
             " at case " + std::to_string(n);
  }
  return "";
}

std::string suite_sliding_tangent(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double eps = d.sign() * d.uniform(5e-3, 5e-2);
    auto sys = welander::make_filippov_xy(params_eps(eps));
    auto sb = welander::sliding_boundaries(params_eps(eps));
    double lo = std::min(sb.x_k0, sb.x_k1), hi = std::max(sb.x_k0, sb.x_k1);
    double u = lo + d.uniform(0.05, 0.95) * (hi - lo);
    Vec x = vec2(u, 0.0);
    if (!sliding_lambda(sys, x))
      return "sliding solution missing inside the segment at eps=" + fmt(eps);
    Vec w = sliding_flow(sys, x);
    double normal = std::abs(w.dot(sys.grad_h(x)));
    if (normal > 1e-10 * (1.0 + w.norm()))
      return "sliding flow leaves the manifold: |w.grad h|=" + fmt(normal);
  }
  return "";
}

std::string suite_classification_partition(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double eps = d.sign() * d.uniform(5e-3, 5e-2);
    auto sys = welander::make_filippov_xy(params_eps(eps));
    double xk0 = 0.75 + 1.25 * eps, xk1 = 0.75 + 3.75 * eps;
    double u = 0.0;
    do {
      u = d.uniform(0.2, 1.3);
    } while (std::abs(u - xk0) < 1e-5 || std::abs(u - xk1) < 1e-5);
    Vec x = vec2(u, 0.0);
    auto bc = classify_boundary(sys, x);
    if (bc.kind == BoundaryKind::Tangency)
      return "tangency reported away from the grazing points at u=" + fmt(u);
    bool crossing_expected = !sliding_lambda(sys, x).has_value();
    if ((bc.kind == BoundaryKind::Crossing) != crossing_expected)
      return "crossing/sliding partition broken at u=" + fmt(u) +
             " eps=" + fmt(eps);
    if (bc.kind == BoundaryKind::StableSliding && !(bc.dS_dlambda < 0))
      return "stable sliding with non-negative dS/dlambda";
    if (bc.kind == BoundaryKind::UnstableSliding && !(bc.dS_dlambda > 0))
      return "unstable sliding with non-positive dS/dlambda";
  }
  return "";
}

std::string suite_sliding_interval(unsigned long seed, int cases) {
  Draw d(seed);
  const double margin = 1e-7;
  for (int n = 0; n < cases; ++n) {
    double eps = d.sign() * d.uniform(1e-3, 0.05);
    auto sys = welander::make_filippov_xy(params_eps(eps));
    double xk0 = 0.75 + 1.25 * eps, xk1 = 0.75 + 3.75 * eps;
    double lo = std::min(xk0, xk1), hi = std::max(xk0, xk1);
    BoundaryKind inside =
        eps > 0 ? BoundaryKind::StableSliding : BoundaryKind::UnstableSliding;
    double mid = lo + d.uniform(0.2, 0.8) * (hi - lo);
    for (double u : {lo + margin, mid, hi - margin}) {
      auto bc = classify_boundary(sys, vec2(u, 0.0));
      if (bc.kind != inside)
        return "expected sliding just inside (" + fmt(lo) + "," + fmt(hi) +
               ") at u=" + fmt(u) + " eps=" + fmt(eps);
    }
    for (double u : {lo - margin, hi + margin}) {
      auto bc = classify_boundary(sys, vec2(u, 0.0));
      if (bc.kind != BoundaryKind::Crossing)
        return "expected crossing just outside the segment at u=" + fmt(u) +
               " eps=" + fmt(eps);
    }
  }
  return "";
}

std::string suite_ds_dlambda(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double eps = d.uniform(-0.05, 0.05);
    auto sys = welander::make_filippov_xy(params_eps(eps));
    auto bc = classify_boundary(sys, vec2(d.uniform(0.2, 1.3), 0.0));
    double tol = 8.0 * 2.220446049250313e-16 *
                 (1.0 + std::abs(bc.s_plus) + std::abs(bc.s_minus));
    if (std::abs(bc.dS_dlambda + eps) > tol)
      return "dS/dlambda != -eps at eps=" + fmt(eps) +
             " (error " + fmt(std::abs(bc.dS_dlambda + eps)) + ")";
  }
  return "";
}

std::string suite_tangency_curvature(unsigned long seed, int cases) {
  Draw d(seed);
  auto p = params_eps(0.0);
  ode::Field fplus = [&p](double, const Vec& y) {
    Eigen::Vector2d v = welander::vector_field_xy(Eigen::Vector2d(y[0], y[1]),
                                                  1.0, p);
    return vec2(v[0], v[1]);
  };
  ode::Field fminus = [&p](double, const Vec& y) {
    Eigen::Vector2d v = welander::vector_field_xy(Eigen::Vector2d(y[0], y[1]),
                                                  0.0, p);
    return vec2(v[0], v[1]);
  };
  Vec gr = vec2(0.75, 0.0);  // both grazing points fuse here at eps=0
  for (int n = 0; n < cases; ++n) {
    double tau = d.uniform(1e-4, 3e-3);
    double yp_f = ode::Dopri5::fixed_step(fplus, 0.0, gr, tau)[1];
    double yp_b = ode::Dopri5::fixed_step(fplus, 0.0, gr, -tau)[1];
    double ym_f = ode::Dopri5::fixed_step(fminus, 0.0, gr, tau)[1];
    double ym_b = ode::Dopri5::fixed_step(fminus, 0.0, gr, -tau)[1];
    if (!(yp_f < 0.0 && yp_b < 0.0))
      return "upper-field orbit has no local maximum on the manifold (tau=" +
             fmt(tau) + ")";
    if (!(ym_f > 0.0 && ym_b > 0.0))
      return "lower-field orbit has no local minimum on the manifold (tau=" +
             fmt(tau) + ")";
  }
  return "";
}

std::string suite_mode_honesty(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double eps = d.uniform(-0.05, 0.05);
    auto sys = welander::make_filippov_xy(params_eps(eps));
    Vec x0 = vec2(d.uniform(0.3, 1.1), d.uniform(-0.3, 0.3));
    auto run = integrate(sys, x0, 0.0, 8.0);
    for (const auto& seg : run.segments)
      for (const auto& x : seg.x) {
        double h = sys.h(x);
        double tol = 1e-8 * (1.0 + x.norm());
        bool ok = seg.mode == Mode::SmoothPlus    ? h >= -tol
                  : seg.mode == Mode::SmoothMinus ? h <= tol
                                                  : std::abs(h) <= tol;
        if (!ok)
          return std::string("sample violates its segment sign: mode ") +
                 to_string(seg.mode) + " h=" + fmt(h);
      }
  }
  return "";
}

std::string suite_event_localization(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double eps = d.uniform(-0.05, 0.05);
    auto sys = welander::make_filippov_xy(params_eps(eps));
    Vec x0 = vec2(d.uniform(0.3, 1.1), d.uniform(-0.3, 0.3));
    auto run = integrate(sys, x0, 0.0, 8.0);
    for (const auto& ev : run.events) {
      switch (ev.kind) {
        case EventKind::CrossingIn:
        case EventKind::CrossingOut:
        case EventKind::SlideEntry:
        case EventKind::SlideExitLambda0:
        case EventKind::SlideExitLambda1:
        case EventKind::TangencyGraze: {
          double h = std::abs(sys.h(ev.x));
          if (h > 1e-9 * (1.0 + ev.x.norm()))
            return std::string("event ") + to_string(ev.kind) +
                   " off the manifold by " + fmt(h);
          break;
        }
        default: break;
      }
    }
  }
  return "";
}

std::string suite_reversibility(unsigned long seed, int cases) {
  Draw d(seed);
  int valid = 0, tries = 0;
  while (valid < cases && tries < 4 * cases) {
    ++tries;
    double eps = d.uniform(-0.05, 0.05);
    auto sys = welander::make_filippov_xy(params_eps(eps));
    Vec x0 = vec2(d.uniform(0.3, 1.1), d.uniform(-0.3, 0.3));
    auto run = integrate(sys, x0, 0.0, 6.0);
    const TrajectorySegment* pick = nullptr;
    for (const auto& seg : run.segments)
      if (seg.mode != Mode::Sliding && seg.t.size() >= 2 &&
          seg.t.back() - seg.t.front() >= 0.05)
        if (!pick || seg.t.back() - seg.t.front() >
                         pick->t.back() - pick->t.front())
          pick = &seg;
    if (!pick) continue;
    ++valid;
    const VectorField& f =
        pick->mode == Mode::SmoothPlus ? sys.f_plus : sys.f_minus;
    double span = pick->t.back() - pick->t.front();
    ode::Options tight;
    tight.rtol = 1e-10;
    tight.atol = 1e-12;
    auto back = ode::integrate_smooth(
        [&f](double, const Vec& y) { return Vec(-f(y)); }, 0.0,
        pick->x.back(), span, tight);
    double err = (back.y.back() - pick->x.front()).norm();
    if (err > 1e-6)
      return "backward flow misses the segment start by " + fmt(err);
  }
  if (valid < cases)
    return "only " + std::to_string(valid) + " usable smooth segments";
  return "";
}

PiecewiseSystem synth_release_plus(double c) {
  PiecewiseSystem sys;
  sys.dim = 2;
  sys.f_plus = [c](const Vec& x) { return vec2(1.0, x[0] - c); };
  sys.f_minus = [](const Vec&) { return vec2(1.0, 1.0); };
  sys.h = [](const Vec& x) { return x[1]; };
  sys.grad_h = [](const Vec&) { return vec2(0.0, 1.0); };
  sys.domain = Box::unbounded(2);
  return sys;
}

PiecewiseSystem synth_release_minus(double c) {
  PiecewiseSystem sys;
  sys.dim = 2;
  sys.f_plus = [](const Vec&) { return vec2(1.0, -1.0); };
  sys.f_minus = [c](const Vec& x) { return vec2(1.0, c - x[0]); };
  sys.h = [](const Vec& x) { return x[1]; };
  sys.grad_h = [](const Vec&) { return vec2(0.0, 1.0); };
  sys.domain = Box::unbounded(2);
  return sys;
}

std::string suite_slide_release(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    bool plus = (n % 2) == 0;
    double c = d.uniform(0.3, 2.0);
    double x0 = c - d.uniform(0.2, 1.5);
    auto sys = plus ? synth_release_plus(c) : synth_release_minus(c);
    auto run = integrate(sys, vec2(x0, 0.0), 0.0, (c - x0) + 1.0);
    EventKind want =
        plus ? EventKind::SlideExitLambda1 : EventKind::SlideExitLambda0;
    const TrajectorySegment* after = nullptr;
    for (const auto& seg : run.segments)
      if (seg.entry.kind == want) after = &seg;
    if (!after)
      return std::string("no ") + to_string(want) + " release (c=" + fmt(c) +
             ", x0=" + fmt(x0) + ")";
    Mode want_mode = plus ? Mode::SmoothPlus : Mode::SmoothMinus;
    if (after->mode != want_mode)
      return std::string("release handed over to mode ") +
             to_string(after->mode);
    const VectorField& f = plus ? sys.f_plus : sys.f_minus;
    Vec probe = ode::Dopri5::fixed_step(
        [&f](double, const Vec& y) { return f(y); }, 0.0, after->entry.x,
        1e-3);
    double hp = sys.h(probe);
    if (plus ? !(hp > 0.0) : !(hp < 0.0))
      return "released field does not carry the state off the manifold (h=" +
             fmt(hp) + ")";
  }
  return "";
}

std::string suite_convergence_order(unsigned long seed, int cases) {
  Draw d(seed);
  int valid = 0, tries = 0;
  while (valid < cases && tries < 5 * cases) {
    ++tries;
    auto p = params_a_eps(d.uniform(0.02, 0.05), d.uniform(-0.05, 0.05));
    auto f = welander::smooth_field_xy(p);
    ode::Field F = [&f](double, const Vec& y) { return f(y); };
    Vec x0 = vec2(d.uniform(0.4, 1.0), d.uniform(-0.2, 0.2));
    const double T = 2.0;
    auto march = [&](int steps) {
      double h = T / steps;
      Vec y = x0;
      for (int i = 0; i < steps; ++i)
        y = ode::Dopri5::fixed_step(F, i * h, y, h);
      return y;
    };
    Vec ref = march(400);
    double e1 = (march(50) - ref).norm();
    double e2 = (march(100) - ref).norm();
    if (e1 < 1e-11) continue;  // below roundoff resolution
    ++valid;
    double ratio = e1 / e2;
    if (!(ratio > 16.0 && ratio < 64.0))
      return "halving the step scaled the error by " + fmt(ratio) +
             " (order-5 pair expects ~32)";
  }
  if (valid < cases) return "too few error pairs above roundoff";
  return "";
}

std::string suite_pointwise_limit(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double rho = d.uniform(-1.0, 1.0);
    double eps = d.uniform(-0.5, 0.5);
    if (std::abs(rho - eps) < 1e-3) {
      --n;
      continue;
    }
    auto p0 = params_eps(eps);
    auto H = welander::k_heaviside(rho, p0);
    if (!H.defined) return "step value undefined off the threshold";
    for (double a : {1e-2, 1e-4, 1e-6}) {
      auto p = params_a_eps(a, eps);
      double err = std::abs(welander::k_smooth(rho, p) - H.value);
      if (err >= 2.0 * a / (M_PI * std::abs(rho - eps)) + 1e-15)
        return "sigmoid limit bound broken: a=" + fmt(a) +
               " |rho-eps|=" + fmt(std::abs(rho - eps)) + " err=" + fmt(err);
    }
  }
  return "";
}

std::string suite_chart_commute(unsigned long seed, int cases) {
  Draw d(seed);
  std::vector<double> grid = {0.0, 2.5, 5.0, 7.5, 10.0};
  ode::Options tight;
  tight.rtol = 1e-11;
  tight.atol = 1e-13;
  for (int n = 0; n < cases; ++n) {
    auto p = params_a_eps(d.uniform(5e-3, 5e-2), d.uniform(-0.05, 0.05));
    Eigen::Vector2d TS0(d.uniform(0.2, 1.2), d.uniform(0.2, 1.2));
    auto ts_path =
        sample_on_grid(welander::smooth_field_TS(p),
                       vec2(TS0[0], TS0[1]), grid, tight);
    Eigen::Vector2d xy0 = welander::to_xy(TS0, p);
    auto xy_path = sample_on_grid(welander::smooth_field_xy(p),
                                  vec2(xy0[0], xy0[1]), grid, tight);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      Eigen::Vector2d mapped = welander::to_xy(
          Eigen::Vector2d(ts_path[j][0], ts_path[j][1]), p);
      double err = std::max(std::abs(mapped[0] - xy_path[j][0]),
                            std::abs(mapped[1] - xy_path[j][1]));
      if (err > 1e-8)
        return "charts disagree by " + fmt(err) + " at t=" + fmt(grid[j]);
    }
  }
  return "";
}

std::string suite_field_ds_dlambda(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    auto p = params_eps(d.uniform(-0.2, 0.2));
    Eigen::Vector2d x(d.uniform(0.0, 1.5), 0.0);
    double diff = (welander::vector_field_xy(x, 1.0, p) -
                   welander::vector_field_xy(x, 0.0, p))[1];
    if (std::abs(diff + p.epsilon) >
        8.0 * 2.220446049250313e-16 * (1.0 + std::abs(diff)))
      return "normal-component gap is not -eps (eps=" + fmt(p.epsilon) + ")";
  }
  return "";
}

std::string suite_virtual_equilibria(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double eps = d.uniform(-1.0 / 15.0 + 2e-3, 0.2 - 2e-3);
    auto re = welander::region_equilibria(params_eps(eps));
    if (!re.k0.is_virtual || !re.k1.is_virtual)
      return "an equilibrium became real inside the bistable-free window "
             "(eps=" +
             fmt(eps) + ")";
  }
  // Pinned probe outside the window: the mixing-on rest point sits on its
  // own side there (h > 0 at both), so only the k=0 one is virtual.
  auto re = welander::region_equilibria(params_eps(-0.1));
  if (!(re.k0.h > 0.0 && re.k0.is_virtual))
    return "k=0 rest point: expected h>0 and virtual at eps=-0.1, got h=" +
           fmt(re.k0.h);
  if (!(re.k1.h > 0.0 && !re.k1.is_virtual))
    return "k=1 rest point: expected h>0 (real) at eps=-0.1, got h=" +
           fmt(re.k1.h);
  return "";
}

std::string suite_blowup_conjugacy(unsigned long seed, int cases) {
  Draw d(seed);
  std::vector<double> grid;
  for (int j = 0; j <= 10; ++j) grid.push_back(1.0 * j);
  ode::Options opt;
  opt.rtol = 1e-9;
  opt.atol = 1e-12;
  for (int n = 0; n < cases; ++n) {
    auto p = params_a_eps(d.uniform(3e-3, 1e-2), d.uniform(-0.02, 0.02));
    double x0 = d.uniform(0.65, 0.85), k0 = d.uniform(0.25, 0.45);
    auto xy = sample_on_grid(welander::smooth_field_xy(p),
                             vec2(x0, p.a * blowup::phi_inv(k0)), grid, opt);
    auto bk = sample_on_grid(blowup::blowup_field_fn(p), vec2(x0, k0), grid,
                             opt);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      double err = std::max(std::abs(xy[j][0] - bk[j][0]),
                            std::abs(blowup::phi(xy[j][1] / p.a) - bk[j][1]));
      if (err > 1e-6)
        return "compactified chart diverges by " + fmt(err) + " at t=" +
               fmt(grid[j]) + " (a=" + fmt(p.a) + ", eps=" + fmt(p.epsilon) +
               ")";
    }
  }
  return "";
}

std::string suite_expansion_remainder(unsigned long seed, int cases) {
  auto le = blowup::local_expansion(true);
  Draw d(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto model = [&le](double xi, double psi, double eps, double a) {
    Eigen::Vector2d f;
    f[0] = a * (le.f1_a_xi * xi + le.f1_a_psi * psi);
    f[1] = le.f2_eps * eps + le.f2_a * a + le.f2_xi * xi +
           (le.f2_a_psi * a + le.f2_eps_psi * eps + le.f2_xi_psi * xi) * psi;
    return f;
  };
  auto actual = [](double xi, double psi, double eps, double a) {
    auto p = params_a_eps(a, eps);
    Vec f = blowup::fast_field(vec2(0.75 + xi, 1.0 / 3.0 + psi), p);
    return Eigen::Vector2d(f[0], f[1]);
  };
  for (int n = 0; n < cases; ++n) {
    double u[4];
    double norm = 0.0;
    for (double& c : u) {
      c = gauss(d.rng);
      norm += c * c;
    }
    norm = std::sqrt(norm);
    for (double& c : u) c /= norm;
    u[3] = std::abs(u[3]);  // layer width is non-negative
    double r = std::exp(d.uniform(std::log(3e-5), std::log(1e-3)));
    auto err_at = [&](double s) {
      Eigen::Vector2d diff =
          actual(s * u[0], s * u[1], s * u[2], s * u[3]) -
          model(s * u[0], s * u[1], s * u[2], s * u[3]);
      return diff.cwiseAbs().maxCoeff();
    };
    double e1 = err_at(r), e2 = err_at(r / 2.0);
    if (e1 > 100.0 * r * r)
      return "first-order remainder too large: " + fmt(e1) + " at r=" +
             fmt(r);
    if (e2 > 1e-14 && e1 / e2 < 2.5)
      return "remainder does not shrink quadratically (ratio " +
             fmt(e1 / e2) + " at r=" + fmt(r) + ")";
  }
  return "";
}

std::string suite_jacobian_consistency(unsigned long seed, int cases) {
  double rho = blowup::hopf_slope();
  for (double t : {1.0, 0.5, 0.25, 0.125}) {
    double a = 4e-3 * t, eps = rho * a;
    auto p = params_a_eps(a, eps);
    auto eq = blowup::smooth_equilibrium(p);
    double gap = (blowup::numeric_jacobian(vec2(eq.x, eq.k), p) -
                  blowup::jacobian(a, eps))
                     .norm();
    if (gap / (a + std::abs(eps)) > 2.5)
      return "linearization gap " + fmt(gap) + " is not first order at a=" +
             fmt(a);
  }
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double a = d.uniform(5e-4, 5e-3);
    double eps = d.uniform(-3.0, 1.0) * a;
    auto p = params_a_eps(a, eps);
    auto eq = blowup::smooth_equilibrium(p);
    double gap = (blowup::numeric_jacobian(vec2(eq.x, eq.k), p) -
                  blowup::jacobian(a, eps))
                     .norm();
    if (gap / (a + std::abs(eps)) > 4.0)
      return "linearization gap ratio " + fmt(gap / (a + std::abs(eps))) +
             " at a=" + fmt(a) + " eps=" + fmt(eps);
  }
  return "";
}

std::string suite_eigen_symmetry(unsigned long seed, int cases) {
  Draw d(seed);
  int valid = 0, tries = 0;
  while (valid < cases && tries < 5 * cases) {
    ++tries;
    double a = d.uniform(5e-4, 5e-3);
    auto p = params_a_eps(a, d.uniform(-3.0, 1.0) * a);
    auto eq = blowup::smooth_equilibrium(p);
    Eigen::Matrix2d J = blowup::numeric_jacobian(vec2(eq.x, eq.k), p);
    double tr = J.trace();
    if (tr * tr - 4.0 * J.determinant() >= 0.0) continue;
    ++valid;
    Eigen::EigenSolver<Eigen::Matrix2d> es(J);
    auto ev = es.eigenvalues();
    if (std::abs(ev[0].real() - tr / 2.0) > 1e-10 ||
        std::abs(ev[1].real() - tr / 2.0) > 1e-10)
      return "focus real parts drift from trace/2";
    if (std::abs(ev[0].imag() + ev[1].imag()) > 1e-12)
      return "eigenvalues are not a conjugate pair";
  }
  if (valid < cases) return "too few focus-type draws";
  return "";
}

std::string suite_equilibrium_limit(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double t = d.uniform(0.0, 1.0);
    double prev = -1.0;
    double dist = 0.0;
    for (double a : {4e-3, 2e-3, 1e-3, 5e-4}) {
      auto eq = blowup::smooth_equilibrium(
          params_a_eps(a, blowup::hopf_line(a) * t));
      dist = std::hypot(eq.x - 0.75, eq.k - 1.0 / 3.0);
      if (prev >= 0.0 && !(dist <= 0.9 * prev + 1e-12))
        return "equilibrium drift does not shrink with a (t=" + fmt(t) + ")";
      prev = dist;
    }
    if (dist > 0.02)
      return "equilibrium still far from the organizing point at a=5e-4";
  }
  return "";
}

std::string suite_regime_consistency(unsigned long seed, int cases) {
  Draw d(seed);
  const double a = 5e-4;
  // Stay clear of the eigenvalue-crossing neighborhood around -8.5a.
  std::vector<double> eps_list;
  for (int n = 0; n < cases / 2; ++n)
    eps_list.push_back(d.uniform(-0.05, -8e-3));
  for (int n = 0; n < cases - cases / 2; ++n)
    eps_list.push_back(d.uniform(4e-3, 0.05));
  auto ns = scan::scan_nonsmooth(eps_list, scan::Budget{}, 2);
  auto sm = scan::scan_smooth({a}, eps_list, 2);
  if (ns.points.size() != sm.points.size())
    return "scan grids diverged after deduplication";
  for (std::size_t i = 0; i < ns.points.size(); ++i) {
    auto nk = ns.points[i].attractor;
    auto sk = sm.points[i].attractor;
    bool ok = (nk == scan::Attractor::SlidingPoint ||
               nk == scan::Attractor::FocusPoint)
                  ? sk == scan::Attractor::EquilibriumPoint
                  : (nk == scan::Attractor::PeriodicOrbit &&
                     sk == scan::Attractor::PeriodicOrbit);
    if (!ok)
      return std::string("regimes disagree at eps=") + fmt(ns.points[i].eps) +
             ": nonsmooth=" + scan::to_string(nk) +
             " smooth=" + scan::to_string(sk);
  }
  return "";
}

std::string suite_scan_determinism(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double a = d.uniform(5e-4, 5e-3);
    double eps = d.uniform(-0.03, 0.03);
    auto d1 = scan::scan_smooth({a}, {eps}, 1);
    auto d2 = scan::scan_smooth({a}, {eps}, 1);
    if (scan::to_csv(d1) != scan::to_csv(d2))
      return "smooth scan bytes changed between identical runs";
  }
  std::vector<double> grid = {-0.03, 0.0, 0.03};
  auto one = scan::scan_nonsmooth(grid, scan::Budget{}, 1);
  auto four = scan::scan_nonsmooth(grid, scan::Budget{}, 4);
  if (scan::to_csv(one) != scan::to_csv(four))
    return "nonsmooth scan bytes depend on the thread count";
  return "";
}

std::string suite_roundtrip_determinism(unsigned long seed, int cases) {
  Draw d(seed);
  for (int n = 0; n < cases; ++n) {
    double eps = d.uniform(-0.05, 0.05);
    double t1 = d.uniform(5.0, 12.0);
    Vec x0 = vec2(d.uniform(0.3, 1.1), d.uniform(-0.3, 0.3));
    std::string text = std::string("{\"version\":1,\"epsilon\":") +
                       fmt17(eps) + ",\"t1\":" + fmt17(t1) + "}";
    auto c1 = parse_config_json(text);
    auto c2 = parse_config_json(text);
    if (c1.epsilon != c2.epsilon || c1.t1 != c2.t1 || c1.system != c2.system)
      return "config parse is not reproducible";
    auto sys = welander::make_filippov_xy(params_eps(eps));
    auto r1 = integrate(sys, x0, 0.0, t1);
    auto r2 = integrate(sys, x0, 0.0, t1);
    if (to_csv(r1) != to_csv(r2) || events_csv(r1) != events_csv(r2))
      return "identical runs produced different output bytes";
  }
  return "";
}

std::string suite_error_contract(unsigned long seed, int cases) {
  Draw d(seed);
  auto expect = [](int kind, const std::function<void()>& fn) -> bool {
    try {
      fn();
    } catch (const ConfigError&) {
      return kind == 1;
    } catch (const NumericsError&) {
      return kind == 2;
    } catch (const IoError&) {
      return kind == 3;
    }
    return false;
  };
  for (int n = 0; n < cases; ++n) {
    int which = n % 10;
    bool ok = true;
    switch (which) {
      case 0:
        ok = expect(1, [&] {
          parse_config_json("{\"version\":1,\"zzz_" + std::to_string(n) +
                            "\":1}");
        });
        break;
      case 1:
        ok = expect(1, [] { parse_config_json("{\"version\":2}"); });
        break;
      case 2:
        ok = expect(1, [] {
          parse_config_json("{\"version\":1,\"rtol\":\"tight\"}");
        });
        break;
      case 3:
        ok = expect(1, [] { parse_config_json("{\"version\":1,"); });
        break;
      case 4:
        ok = expect(1, [] {
          parse_config_json("{\"version\":1,\"system\":\"custom\"}");
        });
        break;
      case 5:
        ok = expect(1, [] {
          auto cfg = parse_config_json("{\"version\":1,\"t1\":-5.0}");
          validate(cfg);
        });
        break;
      case 6:
        ok = expect(1, [] {
          auto cfg = parse_config_json("{\"version\":1,\"threads\":0}");
          validate(cfg);
        });
        break;
      case 7:
        ok = (n % 20 == 7)
                 ? expect(2,
                          [] {
                            brent([](double x) { return 1.0 + x * x; }, 0.0,
                                  1.0);
                          })
                 : expect(2, [] { blowup::phi_inv(1.5); });
        break;
      case 8:
        ok = expect(3, [&] {
          load_config("/pwsim-no-such-dir/" + std::to_string(d.rng()) +
                      ".json");
        });
        break;
      case 9:
        ok = expect(3, [] {
          svg::Figure fig;
          svg::write_file(fig, "/pwsim-no-such-dir/fig.svg");
        });
        break;
    }
    if (!ok)
      return "error category contract broken for case kind " +
             std::to_string(which);
  }
  return "";
}

}  // namespace

std::vector<Result> property_suites(unsigned long seed, int cases) {
  struct Entry {
    const char* name;
    std::string (*fn)(unsigned long, int);
  };
  const Entry entries[] = {
      {"filippov.endpoint-consistency", suite_endpoint_consistency},
      {"filippov.sliding-tangent", suite_sliding_tangent},
      {"filippov.classification-partition", suite_classification_partition},
      {"filippov.sliding-interval", suite_sliding_interval},
      {"filippov.ds-dlambda", suite_ds_dlambda},
      {"filippov.tangency-curvature", suite_tangency_curvature},
      {"hybrid.mode-honesty", suite_mode_honesty},
      {"hybrid.event-localization", suite_event_localization},
      {"hybrid.reversibility", suite_reversibility},
      {"hybrid.slide-release", suite_slide_release},
      {"hybrid.convergence-order", suite_convergence_order},
      {"welander.pointwise-limit", suite_pointwise_limit},
      {"welander.chart-commute", suite_chart_commute},
      {"welander.field-ds-dlambda", suite_field_ds_dlambda},
      {"welander.virtual-equilibria", suite_virtual_equilibria},
      {"blowup.chart-conjugacy", suite_blowup_conjugacy},
      {"blowup.expansion-remainder", suite_expansion_remainder},
      {"blowup.jacobian-consistency", suite_jacobian_consistency},
      {"blowup.eigen-symmetry", suite_eigen_symmetry},
      {"blowup.equilibrium-limit", suite_equilibrium_limit},
      {"scan.regime-consistency", suite_regime_consistency},
      {"scan.determinism", suite_scan_determinism},
      {"cli.roundtrip-determinism", suite_roundtrip_determinism},
      {"cli.error-contract", suite_error_contract},
  };
  std::vector<Result> out;
  unsigned long k = 0;
  for (const auto& e : entries) {
    unsigned long s = seed * 1000003UL + (k++);
    out.push_back(run_suite(e.name, [&e, s, cases] { return e.fn(s, cases); }));
  }
  return out;
}

}  // namespace pwsim::check
