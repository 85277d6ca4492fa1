#include "pwsim/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <string>
#include <utility>

#include "pwsim/errors.hpp"

namespace pwsim {

const char* to_string(Mode m) {
    switch (m) {
        case Mode::SmoothPlus: return "plus";
        case Mode::SmoothMinus: return "minus";
        case Mode::Sliding: return "sliding";
    }
    return "?";
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Start: return "start";
        case EventKind::CrossingIn: return "crossing_in";
        case EventKind::CrossingOut: return "crossing_out";
        case EventKind::SlideEntry: return "slide_entry";
        case EventKind::SlideExitLambda0: return "slide_exit_lambda0";
        case EventKind::SlideExitLambda1: return "slide_exit_lambda1";
        case EventKind::TangencyGraze: return "graze";
        case EventKind::SectionHit: return "section";
        case EventKind::TimeLimit: return "time_limit";
        case EventKind::DomainExit: return "domain_exit";
        case EventKind::ZenoSuspected: return "zeno";
        case EventKind::StepBudget: return "step_budget";
    }
    return "?";
}

namespace {

struct Contact {
    double s_plus, s_minus;
    double denom() const { return s_minus - s_plus; }
    double lambda() const { return s_minus / denom(); }
};

Contact contact_at(const PiecewiseSystem& sys, const Vec& x) {
    const Vec g = sys.grad_h(x);
    return {sys.f_plus(x).dot(g), sys.f_minus(x).dot(g)};
}

Vec project_to_manifold(const PiecewiseSystem& sys, Vec x, double tol_abs) {
    for (int i = 0; i < 60; ++i) {
        const double hv = sys.h(x);
        if (std::abs(hv) <= tol_abs) return x;
        const Vec g = sys.grad_h(x);
        const double g2 = g.squaredNorm();
        if (g2 == 0.0)
            throw NumericsError("manifold projection: vanishing gradient");
        x -= (hv / g2) * g;
    }
    throw NumericsError("manifold projection did not converge");
}

class HybridRun {
  public:
    HybridRun(const PiecewiseSystem& sys, const IntegrationOptions& opts,
              double t0, double t1)
        : sys_(sys), opts_(opts), t0_(t0), t1_(t1) {}

    Trajectory run(Vec x0);

  private:
    const PiecewiseSystem& sys_;
    const IntegrationOptions& opts_;
    double t0_, t1_;

    Trajectory traj_;
    TrajectorySegment seg_;
    Mode mode_ = Mode::SmoothPlus;
    double t_ = 0.0;
    Vec x_;
    bool done_ = false;
    long long steps_used_ = 0;
    std::deque<double> recent_events_;
    double section_block_until_ = 0.0;
    double next_sample_ = 0.0;

    bool has_section() const { return opts_.section.has_value(); }
    double tol_abs(const Vec& x) const {
        return manifold_tolerance(opts_.tol, x);
    }
    double proj_tol(const Vec& x) const {
        return opts_.tol.sliding_project * (1.0 + x.norm());
    }
    Vec project(const Vec& x) const {
        return project_to_manifold(sys_, x, proj_tol(x));
    }

    Mode initial_mode(Vec& x) const;
    void open_segment(const Event& entry);
    void close_segment(const Event& exit);
    void push_point(double t, const Vec& x);
    void sample_step(const ode::DenseOutput& d, double t_hi, const Vec& y_end,
                     bool include_end);
    bool chatter_tripped(double t_ev);
    void finish(Termination term);

    void leg_smooth();
    void leg_sliding();
    void handle_boundary(double t_b, const ode::DenseOutput& d);
    void handle_section_hit(double t_s, Vec x_s);

    bool section_interval(const ode::DenseOutput& d, double ga, double gb,
                          double floor_tol, double* t_s) const;
    double locate_h_zero(const ode::DenseOutput& d, double lo, double hi,
                         bool inside_positive) const;
    double locate_lambda_exit(const ode::DenseOutput& d, double lo, double hi,
                              bool exit_hi) const;
};

Mode HybridRun::initial_mode(Vec& x) const {
    const double hv = sys_.h(x);
    if (std::abs(hv) <= tol_abs(x)) {
        x = project(x);
        const auto lam = sliding_lambda(sys_, x, opts_.tol);
        if (lam) return Mode::Sliding;
        const auto c = contact_at(sys_, x);
        const double s_dom =
            std::abs(c.s_plus) > std::abs(c.s_minus) ? c.s_plus : c.s_minus;
        return s_dom > 0.0 ? Mode::SmoothPlus : Mode::SmoothMinus;
    }
    return hv > 0.0 ? Mode::SmoothPlus : Mode::SmoothMinus;
}

void HybridRun::open_segment(const Event& entry) {
    seg_ = TrajectorySegment{};
    seg_.mode = mode_;
    seg_.entry = entry;
    push_point(entry.t, entry.x);
}

void HybridRun::close_segment(const Event& exit) {
    seg_.exit = exit;
    push_point(exit.t, exit.x);
    traj_.segments.push_back(std::move(seg_));
    seg_ = TrajectorySegment{};
}

void HybridRun::push_point(double t, const Vec& x) {
    if (!seg_.t.empty()) {
        if (t < seg_.t.back()) return;
        if (t == seg_.t.back()) {
            seg_.x.back() = x;  // keep the refined (projected) location
            return;
        }
    }
    seg_.t.push_back(t);
    seg_.x.push_back(x);
}

void HybridRun::sample_step(const ode::DenseOutput& d, double t_hi,
                            const Vec& y_end, bool include_end) {
    if (opts_.sample_dt > 0.0) {
        while (next_sample_ <= t_hi) {
            push_point(next_sample_, d(next_sample_));
            next_sample_ += opts_.sample_dt;
        }
    } else if (include_end) {
        push_point(t_hi, y_end);
    }
}

bool HybridRun::chatter_tripped(double t_ev) {
    recent_events_.push_back(t_ev);
    while (!recent_events_.empty() && recent_events_.front() < t_ev - 1.0)
        recent_events_.pop_front();
    return static_cast<double>(recent_events_.size()) >
           opts_.max_events_per_unit_time;
}

void HybridRun::finish(Termination term) {
    EventKind kind = EventKind::TimeLimit;
    switch (term) {
        case Termination::TimeLimit: kind = EventKind::TimeLimit; break;
        case Termination::DomainExit: kind = EventKind::DomainExit; break;
        case Termination::ZenoSuspected:
            kind = EventKind::ZenoSuspected;
            break;
        case Termination::SectionStop: kind = EventKind::SectionHit; break;
        case Termination::StepBudget: kind = EventKind::StepBudget; break;
    }
    Event ev{kind, t_, x_};
    if (term != Termination::SectionStop) traj_.events.push_back(ev);
    close_segment(ev);
    traj_.termination = term;
    traj_.t_end = t_;
    traj_.x_end = x_;
    done_ = true;
}

double HybridRun::locate_h_zero(const ode::DenseOutput& d, double lo,
                                double hi, bool inside_positive) const {
    const double h_lo = sys_.h(d(lo));
    if (inside_positive ? h_lo <= 0.0 : h_lo >= 0.0) return lo;
    const double tt = opts_.event_time_tol * std::max(1.0, std::abs(hi));
    for (int i = 0; i < 200 && (hi - lo) > tt; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double hm = sys_.h(d(mid));
        const bool inside = inside_positive ? hm > 0.0 : hm < 0.0;
        (inside ? lo : hi) = mid;
    }
    return hi;
}

double HybridRun::locate_lambda_exit(const ode::DenseOutput& d, double lo,
                                     double hi, bool exit_hi) const {
    auto lam_at = [&](double tt) { return contact_at(sys_, d(tt)).lambda(); };
    const double l0 = lam_at(lo);
    if (exit_hi ? l0 > 1.0 : l0 < 0.0) return lo;
    const double tt_tol = opts_.event_time_tol * std::max(1.0, std::abs(hi));
    for (int i = 0; i < 200 && (hi - lo) > tt_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double lm = lam_at(mid);
        const bool inside = exit_hi ? lm <= 1.0 : lm >= 0.0;
        (inside ? lo : hi) = mid;
    }
    return hi;
}

bool HybridRun::section_interval(const ode::DenseOutput& d, double ga,
                                 double gb, double floor_tol,
                                 double* t_s) const {
    if (!has_section()) return false;
    if (d.t0 < section_block_until_) return false;
    // Require a clear departure side so manifold-coincident sections do not
    // flicker on projection noise while sliding.
    if (std::abs(ga) <= floor_tol) return false;
    const int dir = opts_.section->direction;
    const bool up = ga < 0.0 && gb >= 0.0;
    const bool down = ga > 0.0 && gb <= 0.0;
    const bool cand = dir > 0 ? up : dir < 0 ? down : (up || down);
    if (!cand) return false;
    double lo = d.t0, hi = d.t1();
    const bool lo_neg = ga < 0.0;
    const double tt = opts_.event_time_tol * std::max(1.0, std::abs(hi));
    for (int i = 0; i < 200 && (hi - lo) > tt; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double gm = opts_.section->g(d(mid));
        ((gm < 0.0) == lo_neg ? lo : hi) = mid;
    }
    *t_s = hi;
    return true;
}

void HybridRun::handle_section_hit(double t_s, Vec x_s) {
    Event ev{EventKind::SectionHit, t_s, x_s};
    traj_.events.push_back(ev);
    push_point(t_s, x_s);
    section_block_until_ = t_s + opts_.section_arm_time;
    t_ = t_s;
    x_ = std::move(x_s);
    if (opts_.section->stop) {
        finish(Termination::SectionStop);
        return;
    }
    close_segment(ev);
    open_segment(ev);
}

void HybridRun::handle_boundary(double t_b, const ode::DenseOutput& d) {
    const Vec x_star = project(d(t_b));
    const auto cls = classify_boundary(sys_, x_star, opts_.tol);

    Mode next = mode_;
    EventKind kind = EventKind::TangencyGraze;
    switch (cls.kind) {
        case BoundaryKind::StableSliding:
        case BoundaryKind::UnstableSliding:
            next = Mode::Sliding;
            kind = EventKind::SlideEntry;
            break;
        case BoundaryKind::Crossing:
            next = cls.s_plus > 0.0 ? Mode::SmoothPlus : Mode::SmoothMinus;
            kind = next == mode_            ? EventKind::TangencyGraze
                   : next == Mode::SmoothPlus ? EventKind::CrossingIn
                                              : EventKind::CrossingOut;
            break;
        case BoundaryKind::Tangency: {
            std::optional<double> lam;
            bool degenerate = false;
            try {
                lam = sliding_lambda(sys_, x_star, opts_.tol);
            } catch (const DegenerateContact&) {
                degenerate = true;
            }
            if (lam) {
                next = Mode::Sliding;
                kind = EventKind::SlideEntry;
            } else if (!degenerate) {
                const double s_dom =
                    std::abs(cls.s_plus) > std::abs(cls.s_minus)
                        ? cls.s_plus
                        : cls.s_minus;
                next = s_dom > 0.0 ? Mode::SmoothPlus : Mode::SmoothMinus;
                kind = next == mode_            ? EventKind::TangencyGraze
                       : next == Mode::SmoothPlus ? EventKind::CrossingIn
                                                  : EventKind::CrossingOut;
            }
            break;
        }
    }

    Event ev{kind, t_b, x_star};
    traj_.events.push_back(ev);
    const bool zeno = chatter_tripped(t_b);

    // A section touching the switching manifold registers its hits at
    // boundary events; the crossing direction is probed along the new flow.
    bool section_stop = false;
    if (has_section() && t_b >= section_block_until_ &&
        std::abs(opts_.section->g(x_star)) <= tol_abs(x_star)) {
        Vec f_next;
        bool probe_ok = true;
        if (next == Mode::Sliding) {
            const auto c = contact_at(sys_, x_star);
            const double lam = c.lambda();
            if (std::isfinite(lam))
                f_next = lam * sys_.f_plus(x_star) +
                         (1.0 - lam) * sys_.f_minus(x_star);
            else
                probe_ok = false;
        } else {
            f_next = (next == Mode::SmoothPlus ? sys_.f_plus
                                               : sys_.f_minus)(x_star);
        }
        if (probe_ok) {
            const double delta =
                1e-7 * (1.0 + x_star.norm()) / (1.0 + f_next.norm());
            const double dg = opts_.section->g(x_star + delta * f_next) -
                              opts_.section->g(x_star);
            const int dir = opts_.section->direction;
            const bool match =
                dir == 0 ? dg != 0.0 : dir > 0 ? dg > 0.0 : dg < 0.0;
            if (match) {
                traj_.events.push_back({EventKind::SectionHit, t_b, x_star});
                section_block_until_ = t_b + opts_.section_arm_time;
                if (opts_.section->stop) section_stop = true;
            }
        }
    }

    t_ = t_b;
    x_ = x_star;
    if (section_stop) {
        finish(Termination::SectionStop);
        return;
    }
    if (zeno) {
        finish(Termination::ZenoSuspected);
        return;
    }
    close_segment(ev);
    mode_ = next;
    open_segment(ev);
}

void HybridRun::leg_smooth() {
    const bool pos = (mode_ == Mode::SmoothPlus);
    const VectorField f = pos ? sys_.f_plus : sys_.f_minus;
    ode::Dopri5 stepper([f](double, const Vec& y) { return f(y); },
                        opts_.ode);
    stepper.start(t_, x_);
    Vec ya = x_;
    double ha = sys_.h(ya);
    double ga = has_section() ? opts_.section->g(ya) : 0.0;
    ode::DenseOutput d;
    while (!done_) {
        if (!stepper.step_to(t1_, d)) {
            finish(Termination::TimeLimit);
            return;
        }
        ++steps_used_;
        const double ta = d.t0, tb = d.t1();
        const Vec yb = stepper.y();
        const double hb = sys_.h(yb);
        const double tm = 0.5 * (ta + tb);
        const Vec ym = d(tm);
        const double hm = sys_.h(ym);

        // Leaving the current region is flagged when h clearly crosses to
        // the far side of the tolerance band, or crosses zero after the
        // state was clearly interior ("armed"). The midpoint split catches
        // arcs that would tunnel through the band inside one step.
        const bool armed1 = pos ? ha > tol_abs(ya) : ha < -tol_abs(ya);
        auto leaves = [&](bool armed, double h, double tol) {
            return pos ? (h < -tol || (armed && h < 0.0))
                       : (h > tol || (armed && h > 0.0));
        };
        const bool armed2 =
            armed1 || (pos ? hm > tol_abs(ym) : hm < -tol_abs(ym));

        double t_b = 0.0;
        bool have_b = false;
        if (leaves(armed1, hm, tol_abs(ym))) {
            t_b = locate_h_zero(d, ta, tm, pos);
            have_b = true;
        } else if (leaves(armed2, hb, tol_abs(yb))) {
            t_b = locate_h_zero(d, tm, tb, pos);
            have_b = true;
        }

        const double gb = has_section() ? opts_.section->g(yb) : 0.0;
        double t_s = 0.0;
        bool have_s = section_interval(d, ga, gb, tol_abs(ya), &t_s);
        if (have_b && have_s) {
            if (t_s <= t_b)
                have_b = false;
            else
                have_s = false;
        }

        if (have_s) {
            sample_step(d, t_s, yb, false);
            handle_section_hit(t_s, d(t_s));
            return;
        }
        if (have_b) {
            sample_step(d, t_b, yb, false);
            handle_boundary(t_b, d);
            return;
        }

        sample_step(d, tb, yb, true);
        t_ = tb;
        x_ = yb;
        if (!sys_.domain.contains(yb)) {
            finish(Termination::DomainExit);
            return;
        }
        if (steps_used_ >= opts_.max_steps) {
            finish(Termination::StepBudget);
            return;
        }
        ya = yb;
        ha = hb;
        ga = gb;
    }
}

void HybridRun::leg_sliding() {
    const ode::Field f = [this](double, const Vec& y) {
        const auto c = contact_at(sys_, y);
        const double scale =
            1.0 + std::abs(c.s_plus) + std::abs(c.s_minus);
        if (std::abs(c.denom()) <= 1e-14 * scale)
            throw DegenerateContact("sliding flow: degenerate contact");
        const double lam = c.lambda();
        Vec out = lam * sys_.f_plus(y) + (1.0 - lam) * sys_.f_minus(y);
        return out;
    };
    ode::Dopri5 stepper(f, opts_.ode);
    ode::DenseOutput d;
    double ga = has_section() ? opts_.section->g(x_) : 0.0;
    while (!done_) {
        stepper.start(t_, x_);
        if (!stepper.step_to(t1_, d)) {
            finish(Termination::TimeLimit);
            return;
        }
        ++steps_used_;
        const double tb = d.t1();
        Vec xb = project(stepper.y());
        const double lam_b = contact_at(sys_, xb).lambda();

        double t_e = 0.0;
        bool have_e = false;
        bool exit_hi = false;
        if (lam_b < 0.0 || lam_b > 1.0) {
            exit_hi = lam_b > 1.0;
            t_e = locate_lambda_exit(d, d.t0, tb, exit_hi);
            have_e = true;
        }

        const double gb = has_section() ? opts_.section->g(xb) : 0.0;
        double t_s = 0.0;
        bool have_s = section_interval(d, ga, gb, tol_abs(xb), &t_s);
        if (have_e && have_s) {
            if (t_s <= t_e)
                have_e = false;
            else
                have_s = false;
        }

        if (have_s) {
            sample_step(d, t_s, xb, false);
            handle_section_hit(t_s, project(d(t_s)));
            return;
        }
        if (have_e) {
            sample_step(d, t_e, xb, false);
            const Vec x_e = project(d(t_e));
            const EventKind kind = exit_hi ? EventKind::SlideExitLambda1
                                           : EventKind::SlideExitLambda0;
            Event ev{kind, t_e, x_e};
            traj_.events.push_back(ev);
            const bool zeno = chatter_tripped(t_e);
            t_ = t_e;
            x_ = x_e;
            if (zeno) {
                finish(Termination::ZenoSuspected);
                return;
            }
            close_segment(ev);
            mode_ = exit_hi ? Mode::SmoothPlus : Mode::SmoothMinus;
            open_segment(ev);
            return;
        }

        sample_step(d, tb, xb, true);
        t_ = tb;
        x_ = std::move(xb);
        if (!sys_.domain.contains(x_)) {
            finish(Termination::DomainExit);
            return;
        }
        if (steps_used_ >= opts_.max_steps) {
            finish(Termination::StepBudget);
            return;
        }
        ga = gb;
    }
}

Trajectory HybridRun::run(Vec x0) {
    if (!sys_.domain.contains(x0))
        throw DomainError("integrate: initial state outside domain box");
    t_ = t0_;
    x_ = std::move(x0);
    mode_ = initial_mode(x_);
    next_sample_ = t0_ + opts_.sample_dt;
    section_block_until_ = t0_ + opts_.section_arm_time;
    open_segment({EventKind::Start, t_, x_});
    while (!done_) {
        if (t_ >= t1_) {
            finish(Termination::TimeLimit);
            break;
        }
        if (steps_used_ >= opts_.max_steps) {
            finish(Termination::StepBudget);
            break;
        }
        if (mode_ == Mode::Sliding)
            leg_sliding();
        else
            leg_smooth();
    }
    return std::move(traj_);
}

}  // namespace

Trajectory integrate(const PiecewiseSystem& sys, const Vec& x0, double t0,
                     double t1, const IntegrationOptions& opts) {
    return HybridRun(sys, opts, t0, t1).run(x0);
}

namespace {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

std::string to_csv(const Trajectory& traj) {
    std::string out = "t";
    int dim = traj.x_end.size() ? static_cast<int>(traj.x_end.size()) : 2;
    for (int i = 0; i < dim; ++i) out += ",x" + std::to_string(i);
    out += ",mode,segment\n";
    for (std::size_t s = 0; s < traj.segments.size(); ++s) {
        const auto& seg = traj.segments[s];
        for (std::size_t i = 0; i < seg.t.size(); ++i) {
            out += fmt12(seg.t[i]);
            for (int c = 0; c < seg.x[i].size(); ++c)
                out += "," + fmt12(seg.x[i][c]);
            out += ",";
            out += to_string(seg.mode);
            out += "," + std::to_string(s) + "\n";
        }
    }
    return out;
}

std::string events_csv(const Trajectory& traj) {
    std::string out = "t,kind";
    int dim = traj.x_end.size() ? static_cast<int>(traj.x_end.size()) : 2;
    for (int i = 0; i < dim; ++i) out += ",x" + std::to_string(i);
    out += "\n";
    for (const auto& ev : traj.events) {
        out += fmt12(ev.t);
        out += ",";
        out += to_string(ev.kind);
        for (int c = 0; c < ev.x.size(); ++c) out += "," + fmt12(ev.x[c]);
        out += "\n";
    }
    return out;
}

}  // namespace pwsim
