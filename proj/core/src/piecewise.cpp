#include "pwsim/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwsim/errors.hpp"
#include "pwsim/rootfind.hpp"

namespace pwsim {

Box Box::unbounded(int dim) {
    Box b;
    b.lo = Vec::Constant(dim, -std::numeric_limits<double>::infinity());
    b.hi = Vec::Constant(dim, std::numeric_limits<double>::infinity());
    return b;
}

double manifold_tolerance(const FilippovTol& tol, const Vec& x) {
    return tol.manifold_rel * (1.0 + x.norm());
}

bool on_manifold(const PiecewiseSystem& sys, const Vec& x,
                 const FilippovTol& tol) {
    return std::abs(sys.h(x)) <= manifold_tolerance(tol, x);
}

Vec eval_field(const PiecewiseSystem& sys, const Vec& x, double lam) {
    if (!sys.domain.contains(x))
        throw DomainError("eval_field: state outside domain box");
    if (lam == 0.0) return sys.f_minus(x);
    if (lam == 1.0) return sys.f_plus(x);
    return lam * sys.f_plus(x) + (1.0 - lam) * sys.f_minus(x);
}

namespace {

struct NormalComponents {
    double s_plus, s_minus, scale_plus, scale_minus;
};

NormalComponents normal_components(const PiecewiseSystem& sys, const Vec& x) {
    const Vec g = sys.grad_h(x);
    const Vec fp = sys.f_plus(x);
    const Vec fm = sys.f_minus(x);
    return {fp.dot(g), fm.dot(g), 1.0 + fp.norm(), 1.0 + fm.norm()};
}

}  // namespace

std::optional<double> sliding_lambda(const PiecewiseSystem& sys, const Vec& x,
                                     const FilippovTol& tol) {
    if (!on_manifold(sys, x, tol))
        throw NumericsError("sliding_lambda: point not on switching manifold");
    const auto nc = normal_components(sys, x);
    const double denom = nc.s_minus - nc.s_plus;
    const double scale = std::max(nc.scale_plus, nc.scale_minus);
    if (std::abs(denom) <= 1e-14 * scale) {
        if (std::abs(nc.s_minus) <= 1e-14 * scale)
            throw DegenerateContact(
                "sliding_lambda: both one-sided normal components vanish");
        return std::nullopt;  // S constant in lambda and nonzero
    }
    const double lam = nc.s_minus / denom;
    if (lam < 0.0 || lam > 1.0) return std::nullopt;
    return lam;
}

std::optional<double> sliding_lambda_bracketed(
    const std::function<double(double)>& S, double ftol) {
    const double s0 = S(0.0), s1 = S(1.0);
    if (s0 == 0.0) return 0.0;
    if (s1 == 0.0) return 1.0;
    if ((s0 > 0.0) == (s1 > 0.0)) return std::nullopt;
    RootOptions opt;
    opt.xtol = 1e-14;
    opt.ftol = ftol;
    return brent(S, 0.0, 1.0, s0, s1, opt);
}

Vec sliding_flow(const PiecewiseSystem& sys, const Vec& x,
                 const FilippovTol& tol) {
    const auto lam = sliding_lambda(sys, x, tol);
    if (!lam)
        throw NotInSlidingRegion("sliding_flow: no sliding solution here");
    return eval_field(sys, x, *lam);
}

BoundaryClassification classify_boundary(const PiecewiseSystem& sys,
                                         const Vec& x,
                                         const FilippovTol& tol) {
    if (!on_manifold(sys, x, tol))
        throw NumericsError(
            "classify_boundary: point not on switching manifold");
    const auto nc = normal_components(sys, x);
    BoundaryClassification out;
    out.s_plus = nc.s_plus;
    out.s_minus = nc.s_minus;
    out.dS_dlambda = nc.s_plus - nc.s_minus;
    out.tangent_plus = std::abs(nc.s_plus) <= tol.tangency_rel * nc.scale_plus;
    out.tangent_minus =
        std::abs(nc.s_minus) <= tol.tangency_rel * nc.scale_minus;

    if (out.tangent_plus || out.tangent_minus) {
        // A degenerate contact (both sides tangent) is reported here too,
        // with both flags set, never silently averaged into sliding.
        out.kind = BoundaryKind::Tangency;
        return out;
    }
    if (nc.s_plus * nc.s_minus > 0.0) {
        out.kind = BoundaryKind::Crossing;
        return out;
    }
    out.lambda_star = nc.s_minus / (nc.s_minus - nc.s_plus);
    out.kind = (out.dS_dlambda < 0.0) ? BoundaryKind::StableSliding
                                      : BoundaryKind::UnstableSliding;
    return out;
}

namespace {

double normal_component(const PiecewiseSystem& sys, const Vec& x, bool plus) {
    const Vec f = plus ? sys.f_plus(x) : sys.f_minus(x);
    return f.dot(sys.grad_h(x));
}

// Directional derivative of (f . grad h) along f itself, by central
// differences: the second Lie derivative of h along the one-sided field.
double second_lie_derivative(const PiecewiseSystem& sys, const Vec& x,
                             bool plus) {
    const Vec f = plus ? sys.f_plus(x) : sys.f_minus(x);
    const double fn = f.norm();
    if (fn == 0.0) return 0.0;
    const double delta = 1e-6 * (1.0 + x.norm()) / fn;
    const double ahead = normal_component(sys, x + delta * f, plus);
    const double behind = normal_component(sys, x - delta * f, plus);
    return (ahead - behind) / (2.0 * delta);
}

}  // namespace

std::vector<TangencyPoint> find_tangencies(const PiecewiseSystem& sys,
                                           const ManifoldChart& chart,
                                           int seeds,
                                           const FilippovTol& tol) {
    std::vector<TangencyPoint> out;
    if (seeds < 2) seeds = 2;
    for (const bool plus : {true, false}) {
        auto G = [&](double u) {
            return normal_component(sys, chart.embed(u), plus);
        };
        double u_prev = chart.u_lo;
        double g_prev = G(u_prev);
        for (int i = 1; i <= seeds; ++i) {
            const double u =
                chart.u_lo +
                (chart.u_hi - chart.u_lo) * static_cast<double>(i) / seeds;
            const double g = G(u);
            if ((g_prev > 0.0) != (g > 0.0) || g_prev == 0.0) {
                double root;
                try {
                    root = (g_prev == 0.0)
                               ? u_prev
                               : brent(G, u_prev, u, g_prev, g);
                } catch (const NumericsError&) {
                    u_prev = u;
                    g_prev = g;
                    continue;  // nonconvergence at one seed is not fatal
                }
                const Vec loc = chart.embed(root);
                const double lie2 = second_lie_derivative(sys, loc, plus);
                // A tangent arc stays on its own side of the manifold iff h
                // has the matching extremum along it: minimum for f_plus
                // (h >= 0 nearby), maximum for f_minus.
                const bool invisible = plus ? (lie2 < 0.0) : (lie2 > 0.0);
                bool dup = false;
                for (const auto& tp : out)
                    dup = dup ||
                          ((tp.side ==
                            (plus ? TangencySide::Plus : TangencySide::Minus)) &&
                           (tp.location - loc).norm() < 1e-6);
                if (!dup)
                    out.push_back({loc,
                                   plus ? TangencySide::Plus
                                        : TangencySide::Minus,
                                   invisible ? TangencyVisibility::Invisible
                                             : TangencyVisibility::Visible,
                                   lie2});
            }
            u_prev = u;
            g_prev = g;
        }
    }
    std::sort(out.begin(), out.end(),
              [](const TangencyPoint& a, const TangencyPoint& b) {
                  return a.location[0] < b.location[0];
              });
    return out;
}

std::vector<TangencyPoint> find_tangencies(const PiecewiseSystem& sys,
                                           const Box& box, int seeds,
                                           const FilippovTol& tol) {
    if (sys.dim != 2)
        throw DomainError(
            "find_tangencies(box): box sweep implemented for dim == 2; use "
            "the ManifoldChart overload");
    // Chart the manifold by solving h(u, y) = 0 on each vertical grid line.
    ManifoldChart chart;
    chart.u_lo = box.lo[0];
    chart.u_hi = box.hi[0];
    const double ylo = box.lo[1], yhi = box.hi[1];
    chart.embed = [&sys, ylo, yhi](double u) {
        auto hline = [&](double y) {
            Vec p(2);
            p << u, y;
            return sys.h(p);
        };
        Vec p(2);
        const double a = hline(ylo), b = hline(yhi);
        if ((a > 0.0) == (b > 0.0) && a != 0.0 && b != 0.0)
            throw NumericsError("find_tangencies: manifold missing on line");
        const double y = brent(hline, ylo, yhi, a, b);
        p << u, y;
        return p;
    };
    return find_tangencies(sys, chart, seeds, tol);
}

}  // namespace pwsim
