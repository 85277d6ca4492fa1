#include "pwsim/section.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwsim/errors.hpp"
#include "pwsim/rootfind.hpp"

namespace pwsim {

ReturnResult poincare_return(const PiecewiseSystem& sys, const Section& sec,
                             double s, double t_max,
                             const IntegrationOptions& opts) {
    IntegrationOptions run = opts;
    run.section = SectionSpec{sec.g, sec.direction, true};
    ReturnResult out;
    out.trajectory = integrate(sys, sec.embed(s), 0.0, t_max, run);
    if (out.trajectory.termination != Termination::SectionStop)
        throw NoReturn("poincare_return: no directed section hit before t = " +
                       std::to_string(t_max));
    out.t_return = out.trajectory.t_end;
    out.s_next = sec.param(out.trajectory.x_end);
    return out;
}

double poincare_map(const PiecewiseSystem& sys, const Section& sec, double s,
                    double t_max, const IntegrationOptions& opts) {
    return poincare_return(sys, sec, s, t_max, opts).s_next;
}

ReturnResult poincare_return_smooth(const VectorField& f, const Section& sec,
                                    double s, double t_max,
                                    const ode::Options& opt) {
    ode::EventSpec ev;
    ev.g = [&sec](double, const Vec& y) { return sec.g(y); };
    ev.direction = sec.direction;
    const auto res = ode::integrate_smooth(
        [&f](double, const Vec& y) { return f(y); }, 0.0, sec.embed(s), t_max,
        opt, {ev});
    if (!res.event_hit)
        throw NoReturn(
            "poincare_return_smooth: no directed section hit before t = " +
            std::to_string(t_max));
    ReturnResult out;
    out.t_return = res.t_event;
    out.s_next = sec.param(res.y_event);
    // Repackage the smooth run as a single-segment trajectory.
    TrajectorySegment seg;
    seg.mode = Mode::SmoothPlus;
    seg.t = res.t;
    seg.x = res.y;
    seg.entry = {EventKind::Start, 0.0, res.y.front()};
    seg.exit = {EventKind::SectionHit, res.t_event, res.y_event};
    if (seg.t.empty() || seg.t.back() < res.t_event) {
        seg.t.push_back(res.t_event);
        seg.x.push_back(res.y_event);
    }
    out.trajectory.segments.push_back(std::move(seg));
    out.trajectory.termination = Termination::SectionStop;
    out.trajectory.t_end = res.t_event;
    out.trajectory.x_end = res.y_event;
    out.trajectory.events.push_back({EventKind::SectionHit, res.t_event,
                                     res.y_event});
    return out;
}

double poincare_map_smooth(const VectorField& f, const Section& sec, double s,
                           double t_max, const ode::Options& opt) {
    return poincare_return_smooth(f, sec, s, t_max, opt).s_next;
}

namespace {

void flatten(const Trajectory& traj, std::vector<double>& t,
             std::vector<Vec>& x) {
    t.clear();
    x.clear();
    for (const auto& seg : traj.segments)
        for (std::size_t i = 0; i < seg.t.size(); ++i) {
            if (!t.empty() && seg.t[i] <= t.back()) continue;
            t.push_back(seg.t[i]);
            x.push_back(seg.x[i]);
        }
}

PeriodicOrbit cycle_from_map(
    const std::function<double(double)>& P,
    const std::function<ReturnResult(double)>& full_return, double s_lo,
    double s_hi, const CycleOptions& opt) {
    auto D = [&](double s) { return P(s) - s; };
    const double d_lo = D(s_lo), d_hi = D(s_hi);
    if (d_lo == 0.0 && d_hi == 0.0)
        throw BracketInvalid("find_limit_cycle: displacement vanishes at both "
                             "bracket ends");
    double s_star;
    if (d_lo == 0.0)
        s_star = s_lo;
    else if (d_hi == 0.0)
        s_star = s_hi;
    else if ((d_lo > 0.0) == (d_hi > 0.0))
        throw BracketInvalid(
            "find_limit_cycle: displacement map does not change sign over the "
            "bracket");
    else {
        RootOptions ro;
        ro.xtol = 1e-13;
        ro.ftol = opt.root_tol;
        s_star = brent(D, s_lo, s_hi, d_lo, d_hi, ro);
    }
    const double resid = D(s_star);
    if (std::abs(resid) > opt.root_tol)
        throw NotConverged("find_limit_cycle: displacement residual " +
                               std::to_string(resid) + " above tolerance",
                           s_star);

    PeriodicOrbit orbit;
    orbit.section_point = s_star;

    const double delta = std::max(1e-6, 1e-4 * std::abs(s_star));
    const double slope = (P(s_star + delta) - P(s_star - delta)) / (2.0 * delta);
    orbit.floquet = slope;
    const double mag = std::abs(slope);
    if (mag < 1.0 - opt.stability_margin)
        orbit.stability = OrbitStability::Stable;
    else if (mag > 1.0 + opt.stability_margin)
        orbit.stability = OrbitStability::Unstable;
    else
        orbit.stability = OrbitStability::Undetermined;

    const auto cycle = full_return(s_star);
    orbit.period = cycle.t_return;
    flatten(cycle.trajectory, orbit.t, orbit.x);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : orbit.x) {
        lo = std::min(lo, p[opt.amp_coord]);
        hi = std::max(hi, p[opt.amp_coord]);
    }
    orbit.amplitude = hi - lo;
    return orbit;
}

}  // namespace

PeriodicOrbit find_limit_cycle(const PiecewiseSystem& sys, const Section& sec,
                               double s_lo, double s_hi,
                               const CycleOptions& opt) {
    auto P = [&](double s) {
        return poincare_map(sys, sec, s, opt.t_max, opt.integration);
    };
    auto full = [&](double s) {
        return poincare_return(sys, sec, s, opt.t_max, opt.integration);
    };
    return cycle_from_map(P, full, s_lo, s_hi, opt);
}

PeriodicOrbit find_limit_cycle_smooth(const VectorField& f, const Section& sec,
                                      double s_lo, double s_hi,
                                      const CycleOptions& opt) {
    auto P = [&](double s) {
        return poincare_map_smooth(f, sec, s, opt.t_max, opt.smooth);
    };
    auto full = [&](double s) {
        return poincare_return_smooth(f, sec, s, opt.t_max, opt.smooth);
    };
    return cycle_from_map(P, full, s_lo, s_hi, opt);
}

}  // namespace pwsim
