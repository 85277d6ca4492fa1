#pragma once

#include <functional>
#include <vector>

#include "pwsim/hybrid.hpp"

namespace pwsim {

// Codimension-one section with a scalar chart: param maps section points to
// the chart coordinate, embed maps the coordinate back onto the section.
struct Section {
    ScalarField g;
    int direction = +1;
    std::function<double(const Vec&)> param;
    std::function<Vec(double)> embed;
};

struct ReturnResult {
    double s_next = 0.0;
    double t_return = 0.0;
    Trajectory trajectory;
};

// First return to `sec` of the Filippov flow started at embed(s).
// Throws NoReturn if the run ends without a directed section hit.
ReturnResult poincare_return(const PiecewiseSystem& sys, const Section& sec,
                             double s, double t_max,
                             const IntegrationOptions& opts = {});

double poincare_map(const PiecewiseSystem& sys, const Section& sec, double s,
                    double t_max, const IntegrationOptions& opts = {});

// Same return map for a single smooth field (no switching manifold).
ReturnResult poincare_return_smooth(const VectorField& f, const Section& sec,
                                    double s, double t_max,
                                    const ode::Options& opt = {});

double poincare_map_smooth(const VectorField& f, const Section& sec, double s,
                           double t_max, const ode::Options& opt = {});

enum class OrbitStability { Stable, Unstable, Undetermined };

struct PeriodicOrbit {
    double section_point = 0.0;  // fixed point of the return map
    double period = 0.0;
    std::vector<double> t;       // one period of samples
    std::vector<Vec> x;
    double amplitude = 0.0;      // spread of coordinate amp_coord over the cycle
    OrbitStability stability = OrbitStability::Undetermined;
    double floquet = 0.0;        // return-map slope at the fixed point
};

struct CycleOptions {
    double t_max = 200.0;          // per return
    double root_tol = 1e-8;        // on the displacement P(s) - s
    double stability_margin = 0.05;
    int amp_coord = 0;
    IntegrationOptions integration;
    ode::Options smooth;           // used by the smooth-field variant
};

// Fixed point of the return map on [s_lo, s_hi]. The displacement map
// P(s) - s must change sign across the bracket (BracketInvalid otherwise);
// NotConverged carries the best iterate when the tolerance is missed.
PeriodicOrbit find_limit_cycle(const PiecewiseSystem& sys, const Section& sec,
                               double s_lo, double s_hi,
                               const CycleOptions& opt = {});

PeriodicOrbit find_limit_cycle_smooth(const VectorField& f, const Section& sec,
                                      double s_lo, double s_hi,
                                      const CycleOptions& opt = {});

}  // namespace pwsim
