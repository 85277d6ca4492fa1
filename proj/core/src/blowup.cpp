#include "pwsim/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pwsim/errors.hpp"
#include "pwsim/rootfind.hpp"
#include "pwsim/section.hpp"

namespace pwsim::blowup {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void check_k(double k) {
    if (!(k > k_guard && k < 1.0 - k_guard))
        throw DomainError("blowup chart: k = " + fmt_g(k) +
                          " outside the guarded band (" + fmt_g(k_guard) +
                          ", 1 - " + fmt_g(k_guard) + ")");
}

double g_slow(double x, double k, const welander::Params& p) {
    const double s = std::sin(kPi * k), c = std::cos(kPi * k);
    return p.beta - p.beta * p.epsilon - k * p.epsilon - p.alpha +
           p.a * (p.beta + k) * c / s -
           (p.alpha * p.beta - p.alpha) * x;
}

// Field formula with no sign restriction on a; the public entry points
// add their admissibility checks on top. The expansion cross-checks need
// central differences in a through a = 0.
Vec fast_formula(double x, double k, const welander::Params& p) {
    check_k(k);
    const double s = std::sin(kPi * k);
    Vec out(2);
    out << p.a * (1.0 - x - k * x), s * s * g_slow(x, k, p) / kPi;
    return out;
}

}  // namespace

double phi(double z) { return std::atan(z) / kPi + 0.5; }

double phi_inv(double k) {
    if (!(k > 0.0 && k < 1.0))
        throw DomainError("phi_inv: k = " + fmt_g(k) + " outside (0, 1)");
    return std::tan(kPi * (k - 0.5));
}

Vec blowup_field(const Vec& xk, const welander::Params& p) {
    if (!(p.a > 0.0))
        throw DomainError("blowup_field: requires a > 0");
    Vec out = fast_formula(xk[0], xk[1], p);
    out[0] /= p.a;
    out[1] /= p.a;
    return out;
}

Vec fast_field(const Vec& xk, const welander::Params& p) {
    if (p.a < 0.0)
        throw DomainError("fast_field: requires a >= 0");
    return fast_formula(xk[0], xk[1], p);
}

VectorField blowup_field_fn(const welander::Params& p) {
    if (!(p.a > 0.0))
        throw DomainError("blowup_field_fn: requires a > 0");
    return [p](const Vec& xk) { return blowup_field(xk, p); };
}

VectorField fast_field_fn(const welander::Params& p) {
    if (p.a < 0.0)
        throw DomainError("fast_field_fn: requires a >= 0");
    return [p](const Vec& xk) { return fast_field(xk, p); };
}

std::optional<CriticalPoint> critical_manifold(double x,
                                               const welander::Params& p) {
    if (std::abs(p.epsilon) < 1e-14)
        throw NonHyperbolic(
            "critical_manifold: layer equilibrium branch degenerates at "
            "epsilon = 0");
    const double k = (p.beta - p.beta * p.epsilon - p.alpha -
                      (p.alpha * p.beta - p.alpha) * x) /
                     p.epsilon;
    if (!(k > 0.0 && k < 1.0)) return std::nullopt;
    const double s = std::sin(kPi * k);
    return CriticalPoint{k, -(p.epsilon / kPi) * s * s};
}

SmoothEquilibrium smooth_equilibrium(const welander::Params& p) {
    if (!(p.a > 0.0))
        throw DomainError("smooth_equilibrium: requires a > 0");
    double xs = 0.75, ks = 1.0 / 3.0;
    if (const auto pe = welander::pseudoequilibrium(p)) {
        xs = pe->x;
        ks = pe->k;
    }
    return smooth_equilibrium(p, xs, ks);
}

SmoothEquilibrium smooth_equilibrium(const welander::Params& p, double x_seed,
                                     double k_seed) {
    if (!(p.a > 0.0))
        throw DomainError("smooth_equilibrium: requires a > 0");
    const double klo = 10.0 * k_guard, khi = 1.0 - 10.0 * k_guard;
    double x = x_seed, k = std::clamp(k_seed, klo, khi);

    auto residual = [&p](double xx, double kk, double& f1, double& f2) {
        f1 = 1.0 - xx - kk * xx;
        f2 = g_slow(xx, kk, p);
    };
    double f1, f2;
    residual(x, k, f1, f2);
    double fn = std::max(std::abs(f1), std::abs(f2));

    for (int iter = 0; iter < 80 && fn > 1e-13; ++iter) {
        const double s = std::sin(kPi * k), c = std::cos(kPi * k);
        const double j11 = -(1.0 + k), j12 = -x;
        const double j21 = -(p.alpha * p.beta - p.alpha);
        const double j22 = -p.epsilon + p.a * c / s -
                           p.a * kPi * (p.beta + k) / (s * s);
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-300) break;
        const double dx = -(j22 * f1 - j12 * f2) / det;
        const double dk = -(j11 * f2 - j21 * f1) / det;

        bool improved = false;
        double step = 1.0;
        for (int bt = 0; bt < 40; ++bt, step *= 0.5) {
            const double xn = x + step * dx, kn = k + step * dk;
            if (!(kn > k_guard && kn < 1.0 - k_guard)) continue;
            double g1, g2;
            residual(xn, kn, g1, g2);
            const double gn = std::max(std::abs(g1), std::abs(g2));
            if (gn < fn) {
                x = xn;
                k = kn;
                f1 = g1;
                f2 = g2;
                fn = gn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (fn <= 1e-10) return {x, k};

    // Eliminate x = 1/(1 + k) through the first component and bracket the
    // remaining scalar equation over the admissible k range.
    auto G = [&p](double kk) { return g_slow(1.0 / (1.0 + kk), kk, p); };
    const double lo = 1e-4, hi = 1.0 - 1e-4;
    const int n_cells = 2000;
    double best_k = std::numeric_limits<double>::quiet_NaN();
    double prev_k = lo, prev_g = G(lo);
    for (int i = 1; i <= n_cells; ++i) {
        const double kk = lo + (hi - lo) * static_cast<double>(i) / n_cells;
        const double gg = G(kk);
        if (prev_g == 0.0 || (prev_g > 0.0) != (gg > 0.0)) {
            double root;
            try {
                root = prev_g == 0.0 ? prev_k
                                     : brent(G, prev_k, kk, prev_g, gg);
            } catch (const NumericsError&) {
                prev_k = kk;
                prev_g = gg;
                continue;
            }
            if (std::isnan(best_k) ||
                std::abs(root - k_seed) < std::abs(best_k - k_seed))
                best_k = root;
        }
        prev_k = kk;
        prev_g = gg;
    }
    if (std::isnan(best_k))
        throw NoRootInDomain("smooth_equilibrium: no root with k in (0,1) at "
                             "a = " +
                             fmt_g(p.a) + ", eps = " + fmt_g(p.epsilon));
    return {1.0 / (1.0 + best_k), best_k};
}

namespace {

// Field components as a function of the shifted local coordinates.
double local_eval(int comp, double xi, double psi, double eps, double a) {
    welander::Params p;
    p.epsilon = eps;
    p.a = a;
    const Vec v = fast_formula(0.75 + xi, 1.0 / 3.0 + psi, p);
    return v[comp];
}

double richardson1(const std::function<double(double)>& f, double h) {
    auto d = [&](double hh) { return (f(hh) - f(-hh)) / (2.0 * hh); };
    return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

double richardson2_mixed(const std::function<double(double, double)>& f,
                         double h) {
    auto d = [&](double hh) {
        return (f(hh, hh) - f(hh, -hh) - f(-hh, hh) + f(-hh, -hh)) /
               (4.0 * hh * hh);
    };
    return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

double richardson2_pure(const std::function<double(double)>& f, double h) {
    auto d = [&](double hh) {
        return (f(hh) - 2.0 * f(0.0) + f(-hh)) / (hh * hh);
    };
    return (4.0 * d(h / 2.0) - d(h)) / 3.0;
}

}  // namespace

LocalExpansion local_expansion(bool verify) {
    const double rt3 = std::sqrt(3.0);
    LocalExpansion e;
    e.f1_a_xi = -4.0 / 3.0;
    e.f1_a_psi = -0.75;
    e.f2_eps = -5.0 / (8.0 * kPi);
    e.f2_a = 5.0 / (8.0 * kPi * rt3);
    e.f2_xi = 3.0 / (10.0 * kPi);
    e.f2_a_psi = -5.0 / 12.0 + rt3 / (4.0 * kPi);
    e.f2_eps_psi = -(5.0 / (4.0 * rt3) + 3.0 / (4.0 * kPi));
    e.f2_xi_psi = rt3 / 5.0;
    if (!verify) return e;

    const double h1 = 1e-5, h2 = 1e-3;
    auto along = [](int comp, int var) {
        return [comp, var](double t) {
            double c[4] = {0.0, 0.0, 0.0, 0.0};
            c[var] = t;
            return local_eval(comp, c[0], c[1], c[2], c[3]);
        };
    };
    auto along2 = [](int comp, int u, int v) {
        return [comp, u, v](double s, double t) {
            double c[4] = {0.0, 0.0, 0.0, 0.0};
            c[u] = s;
            c[v] += t;
            return local_eval(comp, c[0], c[1], c[2], c[3]);
        };
    };
    // variable indices: 0 = xi, 1 = psi, 2 = eps, 3 = a
    struct Target {
        const char* name;
        double analytic;  // 0 marks a vanishing-coefficient check
        double numeric;
    };
    std::vector<Target> targets = {
        {"d2f1/da dxi", e.f1_a_xi, richardson2_mixed(along2(0, 3, 0), h2)},
        {"d2f1/da dpsi", e.f1_a_psi, richardson2_mixed(along2(0, 3, 1), h2)},
        {"df2/deps", e.f2_eps, richardson1(along(1, 2), h1)},
        {"df2/da", e.f2_a, richardson1(along(1, 3), h1)},
        {"df2/dxi", e.f2_xi, richardson1(along(1, 0), h1)},
        {"d2f2/da dpsi", e.f2_a_psi, richardson2_mixed(along2(1, 3, 1), h2)},
        {"d2f2/deps dpsi", e.f2_eps_psi,
         richardson2_mixed(along2(1, 2, 1), h2)},
        {"d2f2/dxi dpsi", e.f2_xi_psi, richardson2_mixed(along2(1, 0, 1), h2)},
        {"df1/da", 0.0, richardson1(along(0, 3), h1)},
        {"df2/dpsi", 0.0, richardson1(along(1, 1), h1)},
        {"d2f2/dxi2", 0.0, richardson2_pure(along(1, 0), h2)},
        {"d2f2/dpsi2", 0.0, richardson2_pure(along(1, 1), h2)},
        {"d2f2/deps dxi", 0.0, richardson2_mixed(along2(1, 2, 0), h2)},
        {"d2f2/da dxi", 0.0, richardson2_mixed(along2(1, 3, 0), h2)},
    };
    for (const auto& t : targets) {
        ExpansionCheck chk;
        chk.name = t.name;
        chk.analytic = t.analytic;
        chk.numeric = t.numeric;
        chk.error = t.analytic == 0.0
                        ? std::abs(t.numeric)
                        : std::abs(t.numeric - t.analytic) /
                              std::abs(t.analytic);
        e.checks.push_back(chk);
        if (chk.error > 1e-6)
            throw NumericsError("local_expansion: coefficient " + chk.name +
                                " disagrees with finite differences (" +
                                fmt_g(chk.analytic) + " vs " +
                                fmt_g(chk.numeric) + ", err " +
                                fmt_g(chk.error) + ")");
    }
    return e;
}

Eigen::Matrix2d jacobian(double a, double eps) {
    const auto e = local_expansion(false);
    Eigen::Matrix2d J;
    J << e.f1_a_xi * a, e.f1_a_psi * a, e.f2_xi,
        e.f2_eps_psi * eps + e.f2_a_psi * a;
    return J;
}

double trace(double a, double eps) {
    const auto e = local_expansion(false);
    return (e.f1_a_xi + e.f2_a_psi) * a + e.f2_eps_psi * eps;
}

double discriminant(double a, double eps) {
    const Eigen::Matrix2d J = jacobian(a, eps);
    const double tr = J.trace(), det = J.determinant();
    return tr * tr - 4.0 * det;
}

double hopf_slope() {
    const auto e = local_expansion(false);
    return -(e.f1_a_xi + e.f2_a_psi) / e.f2_eps_psi;
}

double hopf_line(double a) {
    if (!(a > 0.0)) throw DomainError("hopf_line: requires a > 0");
    return hopf_slope() * a;
}

Eigen::Matrix2d numeric_jacobian(const Vec& xk, const welander::Params& p) {
    Eigen::Matrix2d J;
    for (int j = 0; j < 2; ++j) {
        const double h = 1e-6 * (1.0 + std::abs(xk[j]));
        Vec up = xk, dn = xk;
        up[j] += h;
        dn[j] -= h;
        const Vec col = (fast_field(up, p) - fast_field(dn, p)) / (2.0 * h);
        J(0, j) = col[0];
        J(1, j) = col[1];
    }
    return J;
}

double leading_real_part(const Eigen::Matrix2d& J) {
    const double tr = J.trace(), det = J.determinant();
    const double disc = tr * tr - 4.0 * det;
    if (disc < 0.0) return 0.5 * tr;
    return 0.5 * (tr + std::sqrt(disc));
}

double leading_imag_part(const Eigen::Matrix2d& J) {
    const double tr = J.trace(), det = J.determinant();
    const double disc = tr * tr - 4.0 * det;
    return disc < 0.0 ? 0.5 * std::sqrt(-disc) : 0.0;
}

namespace {

std::optional<double> fit_loglog_slope(
    const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) return std::nullopt;
    double su = 0.0, sv = 0.0, suu = 0.0, suv = 0.0;
    for (const auto& [d, amp] : pts) {
        if (!(d > 0.0) || !(amp > 0.0)) return std::nullopt;
        const double u = std::log(d), v = std::log(amp);
        su += u;
        sv += v;
        suu += u * u;
        suv += u * v;
    }
    const double n = static_cast<double>(pts.size());
    const double den = n * suu - su * su;
    if (den == 0.0) return std::nullopt;
    return (n * suv - su * sv) / den;
}

}  // namespace

HopfRecord hopf_scan(double a, double eps_lo, double eps_hi, int n,
                     bool measure_amplitudes) {
    if (!(a > 0.0)) throw DomainError("hopf_scan: requires a > 0");
    if (!(eps_hi > eps_lo) || n < 3)
        throw ConfigError("hopf_scan: need eps_lo < eps_hi and n >= 3");

    HopfRecord rec;
    rec.a = a;
    rec.eps_analytic = hopf_line(a);

    welander::Params q;
    q.a = a;
    double xs = 0.0, ks = 0.0;
    bool seeded = false;
    auto re_at = [&](double eps) {
        q.epsilon = eps;
        const auto eq = seeded ? smooth_equilibrium(q, xs, ks)
                               : smooth_equilibrium(q);
        xs = eq.x;
        ks = eq.k;
        seeded = true;
        Vec u(2);
        u << eq.x, eq.k;
        return leading_real_part(numeric_jacobian(u, q));
    };

    rec.max_re_seen = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double eps =
            eps_lo + (eps_hi - eps_lo) * static_cast<double>(i) / (n - 1);
        const double re = re_at(eps);
        rec.re_scan.emplace_back(eps, re);
        rec.max_re_seen = std::max(rec.max_re_seen, re);
    }

    int cross = -1;
    for (int i = 0; i + 1 < static_cast<int>(rec.re_scan.size()); ++i) {
        const double r0 = rec.re_scan[i].second;
        const double r1 = rec.re_scan[i + 1].second;
        if (r0 == 0.0 || r0 * r1 < 0.0) {
            cross = i;
            break;
        }
    }
    if (cross < 0) return rec;

    const double e0 = rec.re_scan[cross].first;
    const double e1 = rec.re_scan[cross + 1].first;
    const double r0 = rec.re_scan[cross].second;
    double eps_star;
    if (r0 == 0.0) {
        eps_star = e0;
    } else {
        RootOptions ro;
        ro.xtol = 1e-12;
        eps_star = brent(re_at, e0, e1, r0, rec.re_scan[cross + 1].second, ro);
    }
    rec.eps_star = eps_star;

    const double dchk = 0.5 * (eps_hi - eps_lo) / (n - 1);
    const double r_above = re_at(eps_star + dchk);
    const double r_below = re_at(eps_star - dchk);
    rec.dre_deps = (r_above - r_below) / (2.0 * dchk);
    rec.stable_above = r_above < 0.0;
    rec.unstable_below = r_below > 0.0;

    if (measure_amplitudes) {
        q.epsilon = eps_star;
        const auto eq_star = smooth_equilibrium(q, xs, ks);
        const double side = rec.unstable_below ? -1.0 : 1.0;
        const double big = std::max(4e-4, 0.05 * std::abs(eps_star));
        for (int j = 0; j < 4; ++j) {
            const double delta = big * std::pow(10.0, -j / 3.0);
            q.epsilon = eps_star + side * delta;
            try {
                const auto eq =
                    smooth_equilibrium(q, eq_star.x, eq_star.k);
                Section sec;
                const double ke = eq.k, xe = eq.x;
                sec.g = [ke](const Vec& u) { return u[1] - ke; };
                sec.direction = +1;
                sec.param = [xe](const Vec& u) { return u[0] - xe; };
                sec.embed = [xe, ke](double s) {
                    Vec u(2);
                    u << xe + s, ke;
                    return u;
                };
                CycleOptions copt;
                copt.t_max = 80.0;
                copt.root_tol = 1e-8;
                copt.amp_coord = 0;
                copt.smooth.rtol = 1e-10;
                copt.smooth.atol = 1e-12;
                const auto orbit = find_limit_cycle_smooth(
                    blowup_field_fn(q), sec, 1e-4, 0.2, copt);
                rec.amplitudes.emplace_back(delta, orbit.amplitude);
            } catch (const NumericsError&) {
                // leave this delta out; the fit below copes with gaps
            }
        }
        rec.amplitude_slope = fit_loglog_slope(rec.amplitudes);
    }
    return rec;
}

HopfRecord verify_hopf_numerically(double a, double eps_lo, double eps_hi,
                                   int n, bool measure_amplitudes) {
    HopfRecord rec = hopf_scan(a, eps_lo, eps_hi, n, measure_amplitudes);
    if (!rec.eps_star)
        throw NotFound("verify_hopf_numerically: no eigenvalue sign change "
                       "over eps in [" +
                       fmt_g(eps_lo) + ", " + fmt_g(eps_hi) + "] at a = " +
                       fmt_g(a) + "; largest Re seen = " +
                       fmt_g(rec.max_re_seen));
    return rec;
}

}  // namespace pwsim::blowup
