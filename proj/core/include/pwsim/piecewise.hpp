#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

namespace pwsim {

using Vec = Eigen::VectorXd;
using VectorField = std::function<Vec(const Vec&)>;
using ScalarField = std::function<double(const Vec&)>;

struct Box {
    Vec lo, hi;
    bool contains(const Vec& x) const {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }
    static Box unbounded(int dim);
};

// Two smooth vector fields separated by the zero set of h.
// f_plus applies where h > 0, f_minus where h < 0; the switching
// manifold {h = 0} must have a nonvanishing gradient inside `domain`.
struct PiecewiseSystem {
    int dim = 2;
    VectorField f_plus, f_minus;
    ScalarField h;
    VectorField grad_h;
    Box domain;
};

struct FilippovTol {
    double manifold_rel = 1e-9;   // |h| <= manifold_rel * (1 + |x|)
    double tangency_rel = 1e-8;   // |f.grad h| <= tangency_rel * (1 + |f|)
    double sliding_project = 1e-10;
};

double manifold_tolerance(const FilippovTol& tol, const Vec& x);
bool on_manifold(const PiecewiseSystem& sys, const Vec& x,
                 const FilippovTol& tol = {});

enum class BoundaryKind { Crossing, StableSliding, UnstableSliding, Tangency };

struct BoundaryClassification {
    BoundaryKind kind;
    std::optional<double> lambda_star;  // present for the sliding kinds
    double s_plus = 0.0;                // f_plus . grad h
    double s_minus = 0.0;               // f_minus . grad h
    double dS_dlambda = 0.0;            // (f_plus - f_minus) . grad h
    bool tangent_plus = false;
    bool tangent_minus = false;
};

enum class TangencySide { Plus, Minus };
enum class TangencyVisibility { Visible, Invisible };

struct TangencyPoint {
    Vec location;
    TangencySide side;
    TangencyVisibility visibility;
    double second_lie;  // curvature of h along the tangent field
};

// Convex combination lam * f_plus + (1 - lam) * f_minus.
Vec eval_field(const PiecewiseSystem& sys, const Vec& x, double lam);

// Solve f(x; lam) . grad h = 0 for lam in [0, 1]. Returns nullopt when no
// admissible lam exists (crossing, or lam-independent nonzero normal
// component). Throws DegenerateContact when both one-sided components vanish.
std::optional<double> sliding_lambda(const PiecewiseSystem& sys, const Vec& x,
                                     const FilippovTol& tol = {});

// Root-finding seam for non-affine lam-dependence: solves S(lam) = 0 on
// [0, 1] by bracketed bisection/Brent, nullopt if no sign change.
std::optional<double> sliding_lambda_bracketed(
    const std::function<double(double)>& S, double ftol = 0.0);

// Filippov sliding vector eval_field(x, lam*); tangent to the manifold.
Vec sliding_flow(const PiecewiseSystem& sys, const Vec& x,
                 const FilippovTol& tol = {});

BoundaryClassification classify_boundary(const PiecewiseSystem& sys,
                                         const Vec& x,
                                         const FilippovTol& tol = {});

// One-parameter parameterization of (a piece of) the switching manifold.
struct ManifoldChart {
    std::function<Vec(double)> embed;
    double u_lo = 0.0, u_hi = 1.0;
};

std::vector<TangencyPoint> find_tangencies(const PiecewiseSystem& sys,
                                           const ManifoldChart& chart,
                                           int seeds = 64,
                                           const FilippovTol& tol = {});

// Planar convenience: solves h = 0 along vertical grid lines of `box`
// (coordinate 0 is the chart parameter) and sweeps for tangencies.
std::vector<TangencyPoint> find_tangencies(const PiecewiseSystem& sys,
                                           const Box& box, int seeds = 64,
                                           const FilippovTol& tol = {});

}  // namespace pwsim
