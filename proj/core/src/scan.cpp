#include "pwsim/scan.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "pwsim/blowup.hpp"
#include "pwsim/errors.hpp"
#include "pwsim/hybrid.hpp"
#include "pwsim/rootfind.hpp"
#include "pwsim/section.hpp"
#include "pwsim/welander.hpp"

namespace pwsim::scan {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Strided work partition; each index is handled exactly once, so bodies
// that write disjoint slots stay deterministic for any thread count.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& body) {
  int nt = std::max(1, threads);
  if (nt == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  nt = static_cast<int>(std::min<std::size_t>(nt, n));
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (int w = 0; w < nt; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < n; i += nt)
          body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct RunVerdict {
  Attractor kind = Attractor::Undetermined;
  double x_star = 0.0;    // converged section abscissa
  double footprint = 0.0;  // manifold width of the final loop
};

// Attractor of one hybrid run: terminal sliding wins outright; otherwise
// the tail of the directed section hits decides between a contracting
// spiral and a closed orbit (nonzero manifold footprint).
RunVerdict classify_run(const Trajectory& run) {
  RunVerdict v;
  if (run.termination == Termination::TimeLimit && !run.segments.empty() &&
      run.segments.back().mode == Mode::Sliding) {
    v.kind = Attractor::SlidingPoint;
    v.x_star = run.x_end[0];
    return v;
  }
  std::vector<double> up, cross;
  for (const auto& ev : run.events) {
    if (ev.kind == EventKind::SectionHit) up.push_back(ev.x[0]);
    if (ev.kind == EventKind::CrossingIn || ev.kind == EventKind::CrossingOut)
      cross.push_back(ev.x[0]);
  }
  if (up.size() < 12) return v;

  double lo = kInf, hi = -kInf;
  for (std::size_t i = up.size() - 6; i < up.size(); ++i) {
    lo = std::min(lo, up[i]);
    hi = std::max(hi, up[i]);
  }
  double spread = hi - lo;
  lo = kInf;
  hi = -kInf;
  std::size_t nc = std::min<std::size_t>(cross.size(), 8);
  for (std::size_t i = cross.size() - nc; i < cross.size(); ++i) {
    lo = std::min(lo, cross[i]);
    hi = std::max(hi, cross[i]);
  }
  v.footprint = nc ? hi - lo : 0.0;
  v.x_star = up.back();

  if (spread < 1e-6) {
    v.kind = v.footprint > 1e-3 ? Attractor::PeriodicOrbit
                                : Attractor::FocusPoint;
    return v;
  }
  std::size_t m = std::min<std::size_t>(10, up.size() - 1);
  bool shrinking = true;
  for (std::size_t i = up.size() - m; i + 1 < up.size(); ++i) {
    double g0 = std::abs(up[i] - up[i - 1]);
    double g1 = std::abs(up[i + 1] - up[i]);
    if (g1 > g0 + 1e-12) shrinking = false;
  }
  if (shrinking) {
    v.kind = Attractor::FocusPoint;
    return v;
  }
  if (v.footprint > 1e-3) v.kind = Attractor::PeriodicOrbit;
  return v;
}

ScanPoint nonsmooth_point(double eps, const Budget& budget,
                          std::vector<std::string>& fails) {
  welander::Params p;
  p.epsilon = eps;
  auto sys = welander::make_filippov_xy(p);
  auto sec = welander::section_xy();

  IntegrationOptions opts;
  opts.section = SectionSpec{sec.g, +1, false};
  opts.sample_dt = 0.5;
  opts.max_steps = std::max<long long>(budget.max_steps() / 4, 10000);

  const std::array<std::array<double, 2>, 4> seeds = {
      {{0.5, 0.2}, {0.9, 0.1}, {0.65, 0.001}, {0.85, -0.05}}};

  std::array<int, 5> votes{};
  std::array<RunVerdict, 5> rep{};
  for (const auto& s : seeds) {
    Vec x0(2);
    x0 << s[0], s[1];
    RunVerdict v = classify_run(integrate(sys, x0, 0.0, 500.0, opts));
    int idx = static_cast<int>(v.kind);
    ++votes[idx];
    rep[idx] = v;
  }

  int best = static_cast<int>(Attractor::Undetermined);
  int best_votes = 0;
  int kinds_seen = 0;
  for (int k = 0; k < 5; ++k) {
    if (k == static_cast<int>(Attractor::Undetermined) || votes[k] == 0)
      continue;
    ++kinds_seen;
    if (votes[k] > best_votes) {
      best_votes = votes[k];
      best = k;
    }
  }
  if (kinds_seen > 1)
    fails.push_back("eps=" + fmt12(eps) +
                    ": seeds disagree on the attractor kind");

  ScanPoint pt;
  pt.a = 0.0;
  pt.eps = eps;
  pt.regime = Regime::NonsmoothFilippov;
  pt.attractor = static_cast<Attractor>(best);
  auto sb = welander::sliding_boundaries(p);
  pt.slide_lo = std::min(sb.x_k0, sb.x_k1);
  pt.slide_hi = std::max(sb.x_k0, sb.x_k1);

  if (pt.attractor == Attractor::PeriodicOrbit) {
    const RunVerdict& v = rep[static_cast<int>(Attractor::PeriodicOrbit)];
    try {
      CycleOptions copt;
      copt.t_max = 120.0;
      auto orbit =
          find_limit_cycle(sys, sec, v.x_star - 0.04, v.x_star + 0.04, copt);
      pt.orbit_amplitude = orbit.amplitude;
    } catch (const NumericsError& e) {
      pt.orbit_amplitude = v.footprint;
      fails.push_back("eps=" + fmt12(eps) +
                      ": cycle refinement failed: " + e.what());
    }
  }
  return pt;
}

double equilibrium_real_part(double a, double eps) {
  welander::Params p;
  p.a = a;
  p.epsilon = eps;
  auto eq = blowup::smooth_equilibrium(p);
  Vec xk(2);
  xk << eq.x, eq.k;
  return blowup::leading_real_part(blowup::numeric_jacobian(xk, p));
}

ScanPoint smooth_point(double a, double eps, bool measure,
                       std::vector<std::string>& fails) {
  ScanPoint pt;
  pt.a = a;
  pt.eps = eps;
  pt.regime = Regime::Smooth;
  welander::Params p;
  p.a = a;
  p.epsilon = eps;
  try {
    auto eq = blowup::smooth_equilibrium(p);
    Vec xk(2);
    xk << eq.x, eq.k;
    auto J = blowup::numeric_jacobian(xk, p);
    double re = blowup::leading_real_part(J);
    pt.eigen_real = re;
    pt.eigen_imag = blowup::leading_imag_part(J);
    if (re < 0.0) {
      pt.attractor = Attractor::EquilibriumPoint;
      return pt;
    }
    pt.attractor = Attractor::PeriodicOrbit;
    if (measure) {
      Section sec;
      const double xe = eq.x, ke = eq.k;
      sec.g = [ke](const Vec& z) { return z[1] - ke; };
      sec.direction = +1;
      sec.param = [xe](const Vec& z) { return z[0] - xe; };
      sec.embed = [xe, ke](double s) {
        Vec z(2);
        z << xe + s, ke;
        return z;
      };
      CycleOptions copt;
      copt.t_max = 80.0;
      copt.smooth.rtol = 1e-10;
      copt.smooth.atol = 1e-12;
      auto orbit = find_limit_cycle_smooth(blowup::blowup_field_fn(p), sec,
                                           1e-3, 0.45, copt);
      pt.orbit_amplitude = orbit.amplitude;
    }
  } catch (const NumericsError& e) {
    fails.push_back("a=" + fmt12(a) + " eps=" + fmt12(eps) + ": " + e.what());
  }
  return pt;
}

}  // namespace

const char* to_string(Regime r) {
  return r == Regime::NonsmoothFilippov ? "nonsmooth" : "smooth";
}

const char* to_string(Attractor a) {
  switch (a) {
    case Attractor::SlidingPoint: return "sliding-point";
    case Attractor::FocusPoint: return "focus-point";
    case Attractor::PeriodicOrbit: return "periodic-orbit";
    case Attractor::EquilibriumPoint: return "equilibrium-point";
    case Attractor::Undetermined: return "undetermined";
  }
  return "?";
}

BifurcationDiagram scan_nonsmooth(const std::vector<double>& eps_grid,
                                  const Budget& budget, int threads) {
  auto eps = sorted_unique(eps_grid);
  BifurcationDiagram d;
  d.points.resize(eps.size());
  std::vector<std::vector<std::string>> fails(eps.size());
  parallel_for(eps.size(), threads, [&](std::size_t i) {
    d.points[i] = nonsmooth_point(eps[i], budget, fails[i]);
  });
  for (auto& f : fails)
    d.failures.insert(d.failures.end(), f.begin(), f.end());
  if (!eps.empty() && eps.front() < 0.0 && eps.back() > 0.0)
    d.bifurcations.push_back({"fused-focus", 0.0, 0.0});
  return d;
}

BifurcationDiagram scan_smooth(const std::vector<double>& a_list,
                               const std::vector<double>& eps_grid,
                               int threads, bool measure_amplitudes) {
  auto as = sorted_unique(a_list);
  auto es = sorted_unique(eps_grid);
  BifurcationDiagram d;
  std::size_t n = as.size() * es.size();
  d.points.resize(n);
  std::vector<std::vector<std::string>> fails(n);
  parallel_for(n, threads, [&](std::size_t j) {
    double a = as[j / es.size()];
    double e = es[j % es.size()];
    d.points[j] = smooth_point(a, e, measure_amplitudes, fails[j]);
  });
  for (auto& f : fails)
    d.failures.insert(d.failures.end(), f.begin(), f.end());

  // Refine eigenvalue sign changes along each eps row into Hopf points.
  for (std::size_t ai = 0; ai < as.size(); ++ai) {
    for (std::size_t ei = 0; ei + 1 < es.size(); ++ei) {
      const auto& p0 = d.points[ai * es.size() + ei];
      const auto& p1 = d.points[ai * es.size() + ei + 1];
      if (!p0.eigen_real || !p1.eigen_real) continue;
      if (*p0.eigen_real == 0.0) continue;
      if (*p0.eigen_real * *p1.eigen_real >= 0.0) continue;
      double a = as[ai];
      try {
        RootOptions ropt;
        ropt.xtol = 1e-12;
        double estar = brent([a](double e) { return equilibrium_real_part(a, e); },
                             p0.eps, p1.eps, *p0.eigen_real, *p1.eigen_real,
                             ropt);
        d.bifurcations.push_back({"smooth-hopf", a, estar});
      } catch (const NumericsError& e) {
        d.failures.push_back("a=" + fmt12(a) +
                             ": Hopf refinement failed: " + e.what());
      }
    }
  }
  return d;
}

std::string to_csv(const BifurcationDiagram& d) {
  std::string out =
      "a,eps,regime,attractor,orbit_amplitude,eigen_real,eigen_imag,"
      "slide_lo,slide_hi\n";
  for (const auto& pt : d.points) {
    out += fmt12(pt.a);
    out += ",";
    out += fmt12(pt.eps);
    out += ",";
    out += to_string(pt.regime);
    out += ",";
    out += to_string(pt.attractor);
    auto field = [&out](const std::optional<double>& v) {
      out += ",";
      if (v) out += fmt12(*v);
    };
    field(pt.orbit_amplitude);
    field(pt.eigen_real);
    field(pt.eigen_imag);
    field(pt.slide_lo);
    field(pt.slide_hi);
    out += "\n";
  }
  return out;
}

std::string to_json_summary(const BifurcationDiagram& d) {
  nlohmann::ordered_json j;
  j["points"] = d.points.size();
  nlohmann::ordered_json counts;
  for (int k = 0; k < 5; ++k) {
    int c = 0;
    for (const auto& pt : d.points)
      if (static_cast<int>(pt.attractor) == k) ++c;
    counts[to_string(static_cast<Attractor>(k))] = c;
  }
  j["attractors"] = counts;
  nlohmann::ordered_json bifs = nlohmann::ordered_json::array();
  for (const auto& b : d.bifurcations) {
    nlohmann::ordered_json e;
    e["kind"] = b.kind;
    e["a"] = b.a;
    e["eps"] = b.eps;
    bifs.push_back(e);
  }
  j["bifurcations"] = bifs;
  j["failures"] = d.failures;
  return j.dump(2) + "\n";
}

}  // namespace pwsim::scan
