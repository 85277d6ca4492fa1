// Command-line front end: simulate trajectories, report sliding structure,
// check the compactified-chart expansion, scan for bifurcations, and run the
// built-in verification battery.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure (also
// used when verification criteria fail), 3 I/O error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "pwsim/blowup.hpp"
#include "pwsim/config.hpp"
#include "pwsim/errors.hpp"
#include "pwsim/hybrid.hpp"
#include "pwsim/scan.hpp"
#include "pwsim/selfcheck.hpp"
#include "pwsim/svg.hpp"
#include "pwsim/welander.hpp"

namespace {

using pwsim::ConfigError;
using pwsim::IoError;
using pwsim::RunConfig;
using pwsim::Vec;

std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

bool wants(const RunConfig& cfg, const std::string& f) {
  for (const auto& s : cfg.formats)
    if (s == f) return true;
  return false;
}

std::string out_path(const RunConfig& cfg, const std::string& suffix) {
  return cfg.out_dir + "/" + cfg.basename + suffix;
}

void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec)
    throw IoError("cannot create output directory '" + cfg.out_dir +
                  "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

void note(const std::string& path) {
  std::fprintf(stderr, "wrote %s\n", path.c_str());
}

// Primary data goes to stdout when requested, otherwise to a file.
void emit(const RunConfig& cfg, bool to_stdout, const std::string& suffix,
          const std::string& text) {
  if (to_stdout) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  auto path = out_path(cfg, suffix);
  write_text(path, text);
  note(path);
}

pwsim::welander::Params params_of(const RunConfig& cfg) {
  pwsim::welander::Params p;
  p.alpha = cfg.alpha;
  p.beta = cfg.beta;
  p.epsilon = cfg.epsilon;
  p.a = cfg.a;
  return p;
}

Vec initial_of(const RunConfig& cfg, double d0, double d1) {
  Vec x0(2);
  if (cfg.initial.size() == 2)
    x0 << cfg.initial[0], cfg.initial[1];
  else
    x0 << d0, d1;
  return x0;
}

std::string smooth_csv(const pwsim::ode::SmoothResult& res, const char* n0,
                       const char* n1) {
  std::string out = std::string("t,") + n0 + "," + n1 + "\n";
  for (std::size_t i = 0; i < res.t.size(); ++i)
    out += fmt12(res.t[i]) + "," + fmt12(res.y[i][0]) + "," +
           fmt12(res.y[i][1]) + "\n";
  return out;
}

pwsim::svg::Figure phase_figure(const std::vector<double>& xs,
                                const std::vector<double>& ys,
                                const std::string& title, const char* xl,
                                const char* yl) {
  pwsim::svg::Figure fig;
  fig.title = title;
  fig.x_label = xl;
  fig.y_label = yl;
  pwsim::svg::Series s;
  s.x = xs;
  s.y = ys;
  fig.series.push_back(std::move(s));
  if (!xs.empty()) {
    fig.markers.push_back({xs.front(), ys.front(), "#2e8b57", 3.5, true,
                           "start"});
    fig.markers.push_back({xs.back(), ys.back(), "#c23b22", 3.5, true,
                           "end"});
  }
  return fig;
}

// ----------------------------------------------------------------------
// simulate
// ----------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, bool to_stdout) {
  ensure_out_dir(cfg);
  auto p = params_of(cfg);
  nlohmann::ordered_json summary;
  summary["system"] = cfg.system;
  summary["epsilon"] = cfg.epsilon;
  summary["a"] = cfg.a;

  std::vector<double> xs, ys;
  const char* xl = "x";
  const char* yl = "y";

  if (cfg.system == "blowup") {
    Vec x0 = initial_of(cfg, 0.6, 0.45);
    pwsim::ode::Options opt;
    opt.rtol = cfg.rtol;
    opt.atol = cfg.atol;
    auto f = pwsim::blowup::blowup_field_fn(p);
    auto res = pwsim::ode::integrate_smooth(
        [&f](double, const Vec& y) { return f(y); }, cfg.t0, x0, cfg.t1, opt);
    if (wants(cfg, "csv")) emit(cfg, to_stdout, "_trajectory.csv",
                                smooth_csv(res, "x", "k"));
    for (std::size_t i = 0; i < res.t.size(); ++i) {
      xs.push_back(res.y[i][0]);
      ys.push_back(res.y[i][1]);
    }
    xl = "x";
    yl = "k";
    summary["t_end"] = res.t.back();
    summary["x_end"] = {res.y.back()[0], res.y.back()[1]};
  } else if (cfg.a > 0.0) {
    // Smoothed switch: a single smooth vector field, no event handling.
    bool ts = cfg.system == "welander-TS";
    Vec x0 = ts ? initial_of(cfg, 0.9, 0.6) : initial_of(cfg, 0.6, 0.05);
    pwsim::ode::Options opt;
    opt.rtol = cfg.rtol;
    opt.atol = cfg.atol;
    auto f = ts ? pwsim::welander::smooth_field_TS(p)
                : pwsim::welander::smooth_field_xy(p);
    auto res = pwsim::ode::integrate_smooth(
        [&f](double, const Vec& y) { return f(y); }, cfg.t0, x0, cfg.t1, opt);
    if (wants(cfg, "csv"))
      emit(cfg, to_stdout, "_trajectory.csv",
           smooth_csv(res, ts ? "T" : "x", ts ? "S" : "y"));
    for (std::size_t i = 0; i < res.t.size(); ++i) {
      xs.push_back(res.y[i][0]);
      ys.push_back(res.y[i][1]);
    }
    xl = ts ? "T" : "x";
    yl = ts ? "S" : "y";
    summary["t_end"] = res.t.back();
    summary["x_end"] = {res.y.back()[0], res.y.back()[1]};
  } else {
    // Discontinuous switch: event-driven Filippov integration.
    bool ts = cfg.system == "welander-TS";
    auto sys = ts ? pwsim::welander::make_filippov_TS(p)
                  : pwsim::welander::make_filippov_xy(p);
    Vec x0 = ts ? initial_of(cfg, 0.9, 0.6) : initial_of(cfg, 0.6, 0.05);
    pwsim::IntegrationOptions opts;
    opts.ode.rtol = cfg.rtol;
    opts.ode.atol = cfg.atol;
    opts.sample_dt = cfg.sample_dt;
    auto run = pwsim::integrate(sys, x0, cfg.t0, cfg.t1, opts);
    if (wants(cfg, "csv")) {
      emit(cfg, to_stdout, "_trajectory.csv", pwsim::to_csv(run));
      if (!to_stdout) {
        auto path = out_path(cfg, "_events.csv");
        write_text(path, pwsim::events_csv(run));
        note(path);
      }
    }
    for (const auto& seg : run.segments)
      for (const auto& x : seg.x) {
        xs.push_back(x[0]);
        ys.push_back(x[1]);
      }
    xl = ts ? "T" : "x";
    yl = ts ? "S" : "y";
    summary["termination"] = "time-limit";
    switch (run.termination) {
      case pwsim::Termination::DomainExit: summary["termination"] = "domain-exit"; break;
      case pwsim::Termination::ZenoSuspected: summary["termination"] = "zeno-suspected"; break;
      case pwsim::Termination::SectionStop: summary["termination"] = "section-stop"; break;
      case pwsim::Termination::StepBudget: summary["termination"] = "step-budget"; break;
      default: break;
    }
    summary["t_end"] = run.t_end;
    summary["x_end"] = {run.x_end[0], run.x_end[1]};
    summary["n_events"] = run.n_events();
    summary["n_segments"] = run.segments.size();
  }

  if (wants(cfg, "svg")) {
    auto fig = phase_figure(xs, ys, "trajectory (" + cfg.system + ")", xl, yl);
    auto path = out_path(cfg, "_trajectory.svg");
    pwsim::svg::write_file(fig, path);
    note(path);
  }
  if (wants(cfg, "json")) {
    auto path = out_path(cfg, "_summary.json");
    write_text(path, summary.dump(2) + "\n");
    note(path);
  }
  if (!to_stdout)
    std::printf("simulate: %s done, t_end=%s\n", cfg.system.c_str(),
                fmt12(summary["t_end"].get<double>()).c_str());
  return 0;
}

// ----------------------------------------------------------------------
// sliding
// ----------------------------------------------------------------------

int cmd_sliding(const RunConfig& cfg, bool to_stdout) {
  ensure_out_dir(cfg);
  std::vector<double> grid = cfg.eps_grid;
  if (grid.empty()) grid.push_back(cfg.epsilon);

  std::string csv =
      "eps,x_k0,x_k1,pseudo_exists,pseudo_x,pseudo_k,k0_virtual,k1_virtual\n";
  std::vector<double> e, xk0, xk1, px;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (double eps : grid) {
    auto p = params_of(cfg);
    p.epsilon = eps;
    auto sb = pwsim::welander::sliding_boundaries(p);
    auto pe = pwsim::welander::pseudoequilibrium(p);
    auto re = pwsim::welander::region_equilibria(p);
    csv += fmt12(eps) + "," + fmt12(sb.x_k0) + "," + fmt12(sb.x_k1) + "," +
           (pe ? "1" : "0") + "," + (pe ? fmt12(pe->x) : "") + "," +
           (pe ? fmt12(pe->k) : "") + "," + (re.k0.is_virtual ? "1" : "0") +
           "," + (re.k1.is_virtual ? "1" : "0") + "\n";
    e.push_back(eps);
    xk0.push_back(sb.x_k0);
    xk1.push_back(sb.x_k1);
    if (pe) px.push_back(pe->x);
    nlohmann::ordered_json row;
    row["eps"] = eps;
    row["x_k0"] = sb.x_k0;
    row["x_k1"] = sb.x_k1;
    if (pe) {
      row["pseudo_x"] = pe->x;
      row["pseudo_k"] = pe->k;
    }
    row["k0_virtual"] = re.k0.is_virtual;
    row["k1_virtual"] = re.k1.is_virtual;
    rows.push_back(row);
  }
  if (wants(cfg, "csv")) emit(cfg, to_stdout, "_sliding.csv", csv);
  if (wants(cfg, "svg") && e.size() > 1) {
    pwsim::svg::Figure fig;
    fig.title = "sliding segment and its rest point";
    fig.x_label = "eps";
    fig.y_label = "x on the switching manifold";
    fig.series.push_back({e, xk0, "#1f6fb2", 1.4, false});
    fig.series.push_back({e, xk1, "#c23b22", 1.4, false});
    if (px.size() == e.size()) fig.series.push_back({e, px, "#555555", 1.2, true});
    auto path = out_path(cfg, "_sliding.svg");
    pwsim::svg::write_file(fig, path);
    note(path);
  }
  if (wants(cfg, "json")) {
    auto path = out_path(cfg, "_sliding.json");
    write_text(path, rows.dump(2) + "\n");
    note(path);
  }
  if (!to_stdout) std::printf("sliding: %zu rows\n", grid.size());
  return 0;
}

// ----------------------------------------------------------------------
// blowup
// ----------------------------------------------------------------------

int cmd_blowup(const RunConfig& cfg, bool to_stdout) {
  ensure_out_dir(cfg);
  auto le = pwsim::blowup::local_expansion(false);
  std::string csv = "coefficient,analytic,numeric,abs_error\n";
  double worst = 0.0;
  for (const auto& c : le.checks) {
    csv += c.name + "," + fmt12(c.analytic) + "," + fmt12(c.numeric) + "," +
           fmt12(c.error) + "\n";
    worst = std::max(worst, c.error);
  }
  if (wants(cfg, "csv")) emit(cfg, to_stdout, "_expansion.csv", csv);
  if (wants(cfg, "json")) {
    nlohmann::ordered_json j;
    j["hopf_slope"] = pwsim::blowup::hopf_slope();
    j["max_check_error"] = worst;
    nlohmann::ordered_json lines = nlohmann::ordered_json::array();
    for (double a : cfg.a_list) {
      nlohmann::ordered_json row;
      row["a"] = a;
      row["eps_hopf"] = pwsim::blowup::hopf_line(a);
      auto eq = pwsim::blowup::smooth_equilibrium(
          [&] { auto p = params_of(cfg); p.a = a; return p; }());
      row["eq_x"] = eq.x;
      row["eq_k"] = eq.k;
      lines.push_back(row);
    }
    j["trace_line"] = lines;
    auto path = out_path(cfg, "_blowup.json");
    write_text(path, j.dump(2) + "\n");
    note(path);
  }
  if (!to_stdout)
    std::printf("blowup: %zu coefficient checks, max error %s\n",
                le.checks.size(), fmt12(worst).c_str());
  return 0;
}

// ----------------------------------------------------------------------
// scan
// ----------------------------------------------------------------------

int cmd_scan(const RunConfig& cfg, bool to_stdout, bool measure) {
  ensure_out_dir(cfg);
  if (cfg.eps_grid.empty())
    throw ConfigError("scan needs a non-empty eps_grid");

  pwsim::scan::Budget budget;
  budget.seconds = cfg.budget_seconds;
  auto ns = pwsim::scan::scan_nonsmooth(cfg.eps_grid, budget, cfg.threads);
  if (wants(cfg, "csv"))
    emit(cfg, to_stdout, "_scan_nonsmooth.csv", pwsim::scan::to_csv(ns));
  if (wants(cfg, "json")) {
    auto path = out_path(cfg, "_scan_nonsmooth.json");
    write_text(path, pwsim::scan::to_json_summary(ns));
    note(path);
  }
  if (wants(cfg, "svg")) {
    pwsim::svg::Figure fig;
    fig.title = "switching-driven attractors";
    fig.x_label = "eps";
    fig.y_label = "orbit amplitude / sliding window";
    pwsim::svg::Series amp, lo, hi;
    for (const auto& pt : ns.points) {
      if (pt.orbit_amplitude) {
        amp.x.push_back(pt.eps);
        amp.y.push_back(*pt.orbit_amplitude);
      }
      if (pt.slide_lo && pt.slide_hi) {
        lo.x.push_back(pt.eps);
        lo.y.push_back(*pt.slide_hi - *pt.slide_lo);
      }
    }
    amp.color = "#c23b22";
    lo.color = "#1f6fb2";
    lo.dashed = true;
    fig.series.push_back(amp);
    fig.series.push_back(lo);
    for (const auto& b : ns.bifurcations)
      fig.markers.push_back({b.eps, 0.0, "#2e8b57", 4.0, true, b.kind});
    auto path = out_path(cfg, "_scan_nonsmooth.svg");
    pwsim::svg::write_file(fig, path);
    note(path);
  }

  if (!cfg.a_list.empty()) {
    auto sm = pwsim::scan::scan_smooth(cfg.a_list, cfg.eps_grid, cfg.threads,
                                       measure);
    if (wants(cfg, "csv")) {
      auto path = out_path(cfg, "_scan_smooth.csv");
      write_text(path, pwsim::scan::to_csv(sm));
      note(path);
    }
    if (wants(cfg, "json")) {
      auto path = out_path(cfg, "_scan_smooth.json");
      write_text(path, pwsim::scan::to_json_summary(sm));
      note(path);
    }
    if (wants(cfg, "svg")) {
      pwsim::svg::Figure fig;
      fig.title = "equilibrium spectrum across the smoothed family";
      fig.x_label = "eps";
      fig.y_label = "leading Re(eigenvalue)";
      const char* palette[5] = {"#1f6fb2", "#c23b22", "#2e8b57", "#8860b2",
                                "#c48a12"};
      std::map<double, pwsim::svg::Series> by_a;
      for (const auto& pt : sm.points)
        if (pt.eigen_real) {
          by_a[pt.a].x.push_back(pt.eps);
          by_a[pt.a].y.push_back(*pt.eigen_real);
        }
      int ci = 0;
      for (auto& [a, s] : by_a) {
        s.color = palette[ci++ % 5];
        fig.series.push_back(s);
      }
      if (!cfg.eps_grid.empty()) {
        pwsim::svg::Series zero;
        zero.x = {*std::min_element(cfg.eps_grid.begin(), cfg.eps_grid.end()),
                  *std::max_element(cfg.eps_grid.begin(), cfg.eps_grid.end())};
        zero.y = {0.0, 0.0};
        zero.color = "#999999";
        zero.dashed = true;
        fig.series.push_back(zero);
      }
      for (const auto& b : sm.bifurcations)
        fig.markers.push_back({b.eps, 0.0, "#2e8b57", 4.0, true, b.kind});
      auto path = out_path(cfg, "_scan_smooth.svg");
      pwsim::svg::write_file(fig, path);
      note(path);
    }
    for (const auto& f : sm.failures)
      std::fprintf(stderr, "scan: %s\n", f.c_str());
  }
  for (const auto& f : ns.failures) std::fprintf(stderr, "scan: %s\n", f.c_str());
  if (!to_stdout)
    std::printf("scan: %zu switching points, %zu smoothed points\n",
                ns.points.size(),
                cfg.a_list.empty() ? std::size_t(0)
                                   : cfg.a_list.size() * cfg.eps_grid.size());
  return 0;
}

// ----------------------------------------------------------------------
// verify
// ----------------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, const std::vector<int>& which,
               bool suites_only, int cases) {
  std::vector<pwsim::check::Result> results;
  if (suites_only) {
    results = pwsim::check::property_suites(cfg.seed, cases);
  } else if (!which.empty()) {
    for (int i : which) results.push_back(pwsim::check::criterion(i));
  } else {
    results = pwsim::check::all_criteria();
  }
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    std::printf("[%s] %-36s (%6.2fs)  %s\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.seconds, r.detail.c_str());
  }
  std::printf("%s: %zu/%zu passed\n", all ? "OK" : "FAILED",
              static_cast<std::size_t>(
                  std::count_if(results.begin(), results.end(),
                                [](const auto& r) { return r.pass; })),
              results.size());
  return all ? 0 : 2;
}

int run(int argc, char** argv) {
  CLI::App app{"piecewise-smooth dynamics: simulation and bifurcation scans"};
  app.set_version_flag("--version", "pwsim 0.1.0");
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir, formats_csv;
  unsigned long seed = 0;
  int threads = 0;
  bool to_stdout = false;
  auto* opt_config =
      app.add_option("--config", config_path, "JSON run configuration file");
  auto* opt_out = app.add_option("--out", out_dir, "output directory");
  auto* opt_fmt = app.add_option(
      "--format", formats_csv, "comma-separated output formats (csv,svg,json)");
  auto* opt_seed = app.add_option("--seed", seed, "random seed");
  auto* opt_threads = app.add_option("--threads", threads, "worker threads");
  app.add_flag("--stdout", to_stdout,
               "write primary CSV to stdout; diagnostics go to stderr");

  double epsilon = 0, a_param = 0, t1 = 0, rtol = 0, atol = 0, sample_dt = 0,
         budget = 0;
  std::string system_name;
  std::vector<double> x0, eps_list, a_list;
  double eps_lo = 0, eps_hi = 0;
  int eps_n = 0;

  auto* sim = app.add_subcommand("simulate", "integrate one trajectory");
  sim->fallthrough();
  auto* s_eps = sim->add_option("--epsilon", epsilon, "switch offset");
  auto* s_a = sim->add_option("--a", a_param, "smoothing layer width");
  auto* s_sys = sim->add_option("--system", system_name,
                                "welander-xy, welander-TS or blowup");
  auto* s_x0 = sim->add_option("--x0", x0, "initial state")->expected(2);
  auto* s_t1 = sim->add_option("--t1", t1, "final time");
  auto* s_rtol = sim->add_option("--rtol", rtol, "relative tolerance");
  auto* s_atol = sim->add_option("--atol", atol, "absolute tolerance");
  auto* s_dt = sim->add_option("--sample-dt", sample_dt,
                               "uniform sample spacing (0 = every step)");

  auto* sld = app.add_subcommand("sliding",
                                 "sliding segment, grazing points, rest points");
  sld->fallthrough();
  auto* d_eps = sld->add_option("--epsilon", epsilon, "switch offset");
  auto* d_grid = sld->add_option("--eps", eps_list, "explicit eps values");

  auto* blw = app.add_subcommand(
      "blowup", "compactified-chart expansion and trace line");
  blw->fallthrough();
  auto* b_alist = blw->add_option("--a", a_list, "layer widths to tabulate");

  auto* scn = app.add_subcommand("scan", "attractor scan over eps (and a)");
  scn->fallthrough();
  auto* c_grid = scn->add_option("--eps", eps_list, "explicit eps values");
  auto* c_lo = scn->add_option("--eps-lo", eps_lo, "grid start");
  auto* c_hi = scn->add_option("--eps-hi", eps_hi, "grid end");
  auto* c_n = scn->add_option("--eps-n", eps_n, "grid size");
  auto* c_alist = scn->add_option("--a", a_list, "layer widths (smoothed scan)");
  auto* c_budget = scn->add_option("--budget", budget,
                                   "per-point budget, CPU-seconds equivalent");
  bool measure = false;
  scn->add_flag("--measure", measure, "also measure smoothed orbit amplitudes");

  auto* ver = app.add_subcommand("verify", "run the verification battery");
  ver->fallthrough();
  std::vector<int> criteria;
  bool suites_only = false;
  int cases = 200;
  ver->add_option("--criterion", criteria, "run only these criteria (1..10)");
  ver->add_flag("--suites", suites_only, "run the randomized invariant suites");
  ver->add_option("--cases", cases, "random cases per suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  RunConfig cfg;
  if (*opt_config) cfg = pwsim::load_config(config_path);
  pwsim::apply_env(cfg);
  if (*opt_out) cfg.out_dir = out_dir;
  if (*opt_fmt) {
    cfg.formats.clear();
    std::string cur;
    for (char ch : formats_csv + ",") {
      if (ch == ',') {
        if (!cur.empty()) cfg.formats.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
  }
  if (*opt_seed) cfg.seed = seed;
  if (*opt_threads) cfg.threads = threads;
  if (*s_eps || *d_eps) cfg.epsilon = epsilon;
  if (*s_a) cfg.a = a_param;
  if (*s_sys) cfg.system = system_name;
  if (*s_x0) cfg.initial = x0;
  if (*s_t1) cfg.t1 = t1;
  if (*s_rtol) cfg.rtol = rtol;
  if (*s_atol) cfg.atol = atol;
  if (*s_dt) cfg.sample_dt = sample_dt;
  if (*d_grid || *c_grid) cfg.eps_grid = eps_list;
  if (*c_lo || *c_hi || *c_n) {
    if (!(*c_lo && *c_hi && *c_n))
      throw ConfigError("--eps-lo, --eps-hi and --eps-n must be given together");
    if (eps_n < 2) throw ConfigError("--eps-n must be at least 2");
    cfg.eps_grid.clear();
    for (int i = 0; i < eps_n; ++i)
      cfg.eps_grid.push_back(eps_lo + (eps_hi - eps_lo) * i / (eps_n - 1));
  }
  if (*b_alist || *c_alist) cfg.a_list = a_list;
  if (*c_budget) cfg.budget_seconds = budget;
  pwsim::validate(cfg);

  if (sim->parsed()) return cmd_simulate(cfg, to_stdout);
  if (sld->parsed()) return cmd_sliding(cfg, to_stdout);
  if (blw->parsed()) return cmd_blowup(cfg, to_stdout);
  if (scn->parsed()) return cmd_scan(cfg, to_stdout, measure);
  if (ver->parsed()) return cmd_verify(cfg, criteria, suites_only, cases);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const pwsim::NumericsError& e) {
    std::fprintf(stderr, "numerics error: %s\n", e.what());
    return 2;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
