#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pwsim/piecewise.hpp"
#include "pwsim/welander.hpp"

namespace pwsim::blowup {

// Compactified mixing coordinate: phi maps the rescaled density excess
// y/a onto k in (0,1); phi_inv is its inverse.
double phi(double z);
double phi_inv(double k);  // DomainError outside (0,1)

inline constexpr double k_guard = 1e-6;

// Slow-time field on the (x,k) cylinder chart. Requires a > 0 and
// k in (k_guard, 1 - k_guard); throws DomainError otherwise, never clamps.
Vec blowup_field(const Vec& xk, const welander::Params& p);

// Fast-time rescaling a * blowup_field; defined down to a = 0 (the layer
// problem). Negative a is rejected. Same k guard.
Vec fast_field(const Vec& xk, const welander::Params& p);

VectorField blowup_field_fn(const welander::Params& p);
VectorField fast_field_fn(const welander::Params& p);

// Equilibrium branch of the layer problem at a = 0: k(x) together with the
// transversal derivative of the fast k-dynamics on it. Throws NonHyperbolic
// when epsilon ~ 0 (the branch degenerates); empty when k(x) leaves (0,1).
struct CriticalPoint {
    double k;
    double transversal;
};
std::optional<CriticalPoint> critical_manifold(double x,
                                               const welander::Params& p);

struct SmoothEquilibrium {
    double x, k;
};
// Joint zero of both field components for a > 0; Newton from a sliding
// rest-point seed with a bracketed one-dimensional fallback.
SmoothEquilibrium smooth_equilibrium(const welander::Params& p);
SmoothEquilibrium smooth_equilibrium(const welander::Params& p, double x_seed,
                                     double k_seed);

// First-order structure of the fast field at the organizing point
// (x, k, eps, a) = (3/4, 1/3, 0, 0), in shifted coordinates xi = x - 3/4,
// psi = k - 1/3. With verify = true every coefficient is cross-checked
// against Richardson-extrapolated central differences of the field formula.
struct ExpansionCheck {
    std::string name;
    double analytic;
    double numeric;
    double error;  // relative for nonzero targets, absolute for zero ones
};
struct LocalExpansion {
    double f1_a_xi;     // d2 f1 / da dxi
    double f1_a_psi;    // d2 f1 / da dpsi
    double f2_eps;      // d f2 / deps
    double f2_a;        // d f2 / da
    double f2_xi;       // d f2 / dxi
    double f2_a_psi;    // d2 f2 / da dpsi
    double f2_eps_psi;  // d2 f2 / deps dpsi
    double f2_xi_psi;   // d2 f2 / dxi dpsi
    std::vector<ExpansionCheck> checks;
};
LocalExpansion local_expansion(bool verify = true);

// Linearization at the organizing point assembled from the expansion
// coefficients, to leading order in (a, eps).
Eigen::Matrix2d jacobian(double a, double eps);
double trace(double a, double eps);
double discriminant(double a, double eps);

// Slope of the trace-zero line eps = hopf_slope() * a, computed from the
// expansion coefficients at runtime.
double hopf_slope();
double hopf_line(double a);  // requires a > 0

Eigen::Matrix2d numeric_jacobian(const Vec& xk, const welander::Params& p);
double leading_real_part(const Eigen::Matrix2d& J);
double leading_imag_part(const Eigen::Matrix2d& J);

struct HopfRecord {
    double a = 0.0;
    double eps_analytic = 0.0;       // hopf_line(a)
    std::optional<double> eps_star;  // numeric eigenvalue crossing, if any
    double max_re_seen = 0.0;        // largest Re over the scanned grid
    double dre_deps = 0.0;           // slope of Re(eps) at the crossing
    std::vector<std::pair<double, double>> re_scan;  // (eps, Re)
    std::optional<double> amplitude_slope;  // log-log growth vs distance
    std::vector<std::pair<double, double>> amplitudes;  // (delta, amplitude)
    bool stable_above = false;
    bool unstable_below = false;
};

// Scan the real part of the leading eigenvalue pair of the equilibrium
// over eps in [eps_lo, eps_hi] at fixed a; refine a sign change if one
// exists and optionally measure limit-cycle amplitudes on the unstable
// side. Always returns the record, crossing or not.
HopfRecord hopf_scan(double a, double eps_lo, double eps_hi, int n = 41,
                     bool measure_amplitudes = false);

// Like hopf_scan but demands the crossing: throws NotFound (reporting the
// largest Re seen) when the scanned range contains no sign change.
HopfRecord verify_hopf_numerically(double a, double eps_lo, double eps_hi,
                                   int n = 41, bool measure_amplitudes = true);

}  // namespace pwsim::blowup
