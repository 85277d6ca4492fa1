#pragma once

#include <optional>

#include "pwsim/piecewise.hpp"
#include "pwsim/section.hpp"

namespace pwsim::welander {

// Two-box ocean convection model: temperature T and salinity S relax
// toward surface forcing while a density-triggered mixing coefficient k
// flushes both. The density excess rho = -alpha*T + S turns mixing on
// above the threshold epsilon.
struct Params {
    double alpha = 0.8;    // thermal density coefficient
    double beta = 0.5;     // salinity relaxation rate
    double epsilon = 0.0;  // mixing threshold on the density excess
    double a = 0.0;        // sigmoid width of the smooth mixing law
};

// Smooth mixing law: atan sigmoid in (rho - epsilon)/a. Requires a > 0.
double k_smooth(double rho, const Params& p);

struct SwitchValue {
    double value;
    bool defined;  // false exactly on the threshold rho == epsilon
};
SwitchValue k_heaviside(double rho, const Params& p);

double density_excess(const Eigen::Vector2d& TS, const Params& p);

Eigen::Vector2d vector_field_TS(const Eigen::Vector2d& TS, double k,
                                const Params& p);

// Boundary-adapted coordinates x = T, y = rho - epsilon; the switching
// manifold becomes {y = 0}.
Eigen::Vector2d to_xy(const Eigen::Vector2d& TS, const Params& p);
Eigen::Vector2d from_xy(const Eigen::Vector2d& xy, const Params& p);

Eigen::Vector2d vector_field_xy(const Eigen::Vector2d& xy, double k,
                                const Params& p);

// Single smooth field using k_smooth (requires p.a > 0).
VectorField smooth_field_xy(const Params& p);
VectorField smooth_field_TS(const Params& p);

// Filippov system of the discontinuous limit (k = 1 above the manifold,
// k = 0 below), in either chart.
PiecewiseSystem make_filippov_xy(const Params& p);
PiecewiseSystem make_filippov_TS(const Params& p);

// Abscissae on {y = 0} where the one-sided normal components vanish:
// x_k0 for the k = 0 field, x_k1 for the k = 1 field. These bound the
// sliding segment.
struct SlidingBoundaries {
    double x_k0, x_k1;
};
SlidingBoundaries sliding_boundaries(const Params& p);

// Rest point of the sliding flow on {y = 0}; k is the Filippov convex
// parameter there. Empty when the sliding flow has no rest point on the
// admissible range k in [0, 1].
struct PseudoEquilibrium {
    double x, k;
};
std::optional<PseudoEquilibrium> pseudoequilibrium(const Params& p);

// The two one-sided equilibria; each is virtual when it falls on the side
// of the manifold where its own field is not active.
struct RegionEquilibrium {
    Eigen::Vector2d TS;
    Eigen::Vector2d xy;
    double h;  // manifold offset rho - epsilon at the equilibrium
    bool is_virtual;
};
struct RegionEquilibria {
    RegionEquilibrium k0, k1;
};
RegionEquilibria region_equilibria(const Params& p);

// Poincare section {y = 0, dy/dt > 0} in the xy chart, parameterized by x.
Section section_xy();

Box default_domain_xy();
Box default_domain_TS();

}  // namespace pwsim::welander
