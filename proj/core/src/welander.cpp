#include "pwsim/welander.hpp"

#include <algorithm>
#include <cmath>

#include "pwsim/errors.hpp"

namespace pwsim::welander {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

// Drift of y on the manifold, split so that the k-dependence is the exact
// term -k*epsilon: base(x) - k*eps - (beta + k)*y. Evaluating base(x)
// identically for k = 0 and k = 1 keeps the lambda-derivative of the
// normal component equal to -epsilon up to rounding.
double y_drift_base(double x, const Params& p) {
    return p.beta - p.beta * p.epsilon - p.alpha -
           (p.alpha * p.beta - p.alpha) * x;
}
}  // namespace

double k_smooth(double rho, const Params& p) {
    if (!(p.a > 0.0))
        throw DomainError("k_smooth: smoothing width must be positive");
    return std::atan((rho - p.epsilon) / p.a) / kPi + 0.5;
}

SwitchValue k_heaviside(double rho, const Params& p) {
    if (rho > p.epsilon) return {1.0, true};
    if (rho < p.epsilon) return {0.0, true};
    return {0.5, false};
}

double density_excess(const Eigen::Vector2d& TS, const Params& p) {
    return -p.alpha * TS[0] + TS[1];
}

Eigen::Vector2d vector_field_TS(const Eigen::Vector2d& TS, double k,
                                const Params& p) {
    const double T = TS[0], S = TS[1];
    return {1.0 - T - k * T, p.beta * (1.0 - S) - k * S};
}

Eigen::Vector2d to_xy(const Eigen::Vector2d& TS, const Params& p) {
    return {TS[0], -p.alpha * TS[0] + TS[1] - p.epsilon};
}

Eigen::Vector2d from_xy(const Eigen::Vector2d& xy, const Params& p) {
    return {xy[0], xy[1] + p.alpha * xy[0] + p.epsilon};
}

Eigen::Vector2d vector_field_xy(const Eigen::Vector2d& xy, double k,
                                const Params& p) {
    const double x = xy[0], y = xy[1];
    return {1.0 - x - k * x,
            y_drift_base(x, p) - k * p.epsilon - (p.beta + k) * y};
}

VectorField smooth_field_xy(const Params& p) {
    if (!(p.a > 0.0))
        throw DomainError("smooth_field_xy: smoothing width must be positive");
    return [p](const Vec& xy) -> Vec {
        const double k = std::atan(xy[1] / p.a) / kPi + 0.5;
        return vector_field_xy(xy.head<2>(), k, p);
    };
}

VectorField smooth_field_TS(const Params& p) {
    if (!(p.a > 0.0))
        throw DomainError("smooth_field_TS: smoothing width must be positive");
    return [p](const Vec& TS) -> Vec {
        const double k = k_smooth(density_excess(TS.head<2>(), p), p);
        return vector_field_TS(TS.head<2>(), k, p);
    };
}

Box default_domain_xy() {
    Box b;
    b.lo = Vec(2);
    b.hi = Vec(2);
    b.lo << -1.0, -2.0;
    b.hi << 3.0, 2.0;
    return b;
}

Box default_domain_TS() {
    Box b;
    b.lo = Vec(2);
    b.hi = Vec(2);
    b.lo << -1.0, -4.0;
    b.hi << 3.0, 5.0;
    return b;
}

PiecewiseSystem make_filippov_xy(const Params& p) {
    PiecewiseSystem sys;
    sys.dim = 2;
    sys.f_plus = [p](const Vec& xy) -> Vec {
        return vector_field_xy(xy.head<2>(), 1.0, p);
    };
    sys.f_minus = [p](const Vec& xy) -> Vec {
        return vector_field_xy(xy.head<2>(), 0.0, p);
    };
    sys.h = [](const Vec& xy) { return xy[1]; };
    sys.grad_h = [](const Vec&) -> Vec {
        Vec g(2);
        g << 0.0, 1.0;
        return g;
    };
    sys.domain = default_domain_xy();
    return sys;
}

PiecewiseSystem make_filippov_TS(const Params& p) {
    PiecewiseSystem sys;
    sys.dim = 2;
    sys.f_plus = [p](const Vec& TS) -> Vec {
        return vector_field_TS(TS.head<2>(), 1.0, p);
    };
    sys.f_minus = [p](const Vec& TS) -> Vec {
        return vector_field_TS(TS.head<2>(), 0.0, p);
    };
    sys.h = [p](const Vec& TS) {
        return -p.alpha * TS[0] + TS[1] - p.epsilon;
    };
    sys.grad_h = [p](const Vec&) -> Vec {
        Vec g(2);
        g << -p.alpha, 1.0;
        return g;
    };
    sys.domain = default_domain_TS();
    return sys;
}

SlidingBoundaries sliding_boundaries(const Params& p) {
    const double slope = p.alpha * p.beta - p.alpha;
    if (std::abs(slope) < 1e-14)
        throw DomainError(
            "sliding_boundaries: degenerate geometry, alpha*(beta - 1) = 0");
    const double num0 = p.beta - p.beta * p.epsilon - p.alpha;
    return {num0 / slope, (num0 - p.epsilon) / slope};
}

std::optional<PseudoEquilibrium> pseudoequilibrium(const Params& p) {
    // Rest point of the sliding flow: x = 1/(1 + k) together with the
    // convex parameter condition base(x) = k*eps gives
    //   -eps k^2 + (beta - beta*eps - alpha - eps) k + (beta - beta*eps
    //    - alpha*beta) = 0.
    const double A = -p.epsilon;
    const double B = p.beta - p.beta * p.epsilon - p.alpha - p.epsilon;
    const double C = p.beta - p.beta * p.epsilon - p.alpha * p.beta;

    double roots[2];
    int n_roots = 0;
    if (std::abs(A) < 1e-12) {
        if (std::abs(B) < 1e-14) return std::nullopt;
        roots[n_roots++] = -C / B;
    } else {
        const double disc = B * B - 4.0 * A * C;
        if (disc < 0.0) return std::nullopt;
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
        roots[n_roots++] = q / A;
        if (q != 0.0) roots[n_roots++] = C / q;
    }

    bool found = false;
    double k_best = 0.0;
    for (int i = 0; i < n_roots; ++i) {
        const double k = roots[i];
        if (k < -1e-12 || k > 1.0 + 1e-12) continue;
        if (!found || std::abs(k - 1.0 / 3.0) < std::abs(k_best - 1.0 / 3.0)) {
            k_best = k;
            found = true;
        }
    }
    if (!found) return std::nullopt;
    const double k = std::clamp(k_best, 0.0, 1.0);
    return PseudoEquilibrium{1.0 / (1.0 + k), k};
}

RegionEquilibria region_equilibria(const Params& p) {
    RegionEquilibria out;

    out.k0.TS = {1.0, 1.0};
    out.k0.xy = to_xy(out.k0.TS, p);
    out.k0.h = out.k0.xy[1];
    out.k0.is_virtual = !(out.k0.h < 0.0);  // k = 0 owns the rho < eps side

    out.k1.TS = {0.5, p.beta / (p.beta + 1.0)};
    out.k1.xy = to_xy(out.k1.TS, p);
    out.k1.h = out.k1.xy[1];
    out.k1.is_virtual = !(out.k1.h > 0.0);  // k = 1 owns the rho > eps side
    return out;
}

Section section_xy() {
    Section sec;
    sec.g = [](const Vec& xy) { return xy[1]; };
    sec.direction = +1;
    sec.param = [](const Vec& xy) { return xy[0]; };
    sec.embed = [](double s) -> Vec {
        Vec xy(2);
        xy << s, 0.0;
        return xy;
    };
    return sec;
}

}  // namespace pwsim::welander
