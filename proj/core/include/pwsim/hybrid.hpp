#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pwsim/ode.hpp"
#include "pwsim/piecewise.hpp"

namespace pwsim {

enum class Mode { SmoothPlus, SmoothMinus, Sliding };

enum class EventKind {
    Start,
    CrossingIn,        // entered the h > 0 region
    CrossingOut,       // entered the h < 0 region
    SlideEntry,
    SlideExitLambda0,  // sliding convexity parameter reached 0, released minus
    SlideExitLambda1,  // reached 1, released plus
    TangencyGraze,
    SectionHit,
    TimeLimit,
    DomainExit,
    ZenoSuspected,
    StepBudget,
};

const char* to_string(Mode m);
const char* to_string(EventKind k);

struct Event {
    EventKind kind;
    double t;
    Vec x;
};

struct TrajectorySegment {
    Mode mode;
    std::vector<double> t;
    std::vector<Vec> x;
    Event entry;
    Event exit;
};

enum class Termination {
    TimeLimit,
    DomainExit,
    ZenoSuspected,
    SectionStop,
    StepBudget,
};

struct SectionSpec {
    ScalarField g;
    int direction = +1;  // +1: g increasing through 0; -1: decreasing; 0: any
    bool stop = true;    // terminate the run at the first hit
};

struct IntegrationOptions {
    ode::Options ode;
    FilippovTol tol;
    double event_time_tol = 1e-12;
    double max_events_per_unit_time = 1e4;
    long long max_steps = 50'000'000;
    double sample_dt = 0.0;  // 0: record every accepted step
    std::optional<SectionSpec> section;
    double section_arm_time = 1e-9;  // ignore hits within this of the start
};

struct Trajectory {
    std::vector<TrajectorySegment> segments;
    Termination termination = Termination::TimeLimit;
    double t_end = 0.0;
    Vec x_end;
    std::vector<Event> events;  // mode changes, grazes and section hits

    std::size_t n_events() const { return events.size(); }
};

// Integrate the Filippov system from x0 over [t0, t1], switching between
// one-sided smooth flows and the sliding flow as boundary events dictate.
Trajectory integrate(const PiecewiseSystem& sys, const Vec& x0, double t0,
                     double t1, const IntegrationOptions& opts = {});

// Sample rows "t,x0,...,mode,segment"; byte-stable for identical runs.
std::string to_csv(const Trajectory& traj);

// Event rows "t,kind,x0,...".
std::string events_csv(const Trajectory& traj);

}  // namespace pwsim
