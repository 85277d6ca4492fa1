#include "pwsim/ode.hpp"

#include <algorithm>
#include <cmath>

#include "pwsim/errors.hpp"

namespace pwsim::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                 a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// y5 - y4 error weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double atol,
                  double rtol) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc =
            atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double q = err[i] / sc;
        sum += q * q;
    }
    return std::sqrt(sum / static_cast<double>(err.size()));
}

}  // namespace

Vec DenseOutput::operator()(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return cont[0] +
           th * (cont[1] + th1 * (cont[2] + th * (cont[3] + th1 * cont[4])));
}

Dopri5::Dopri5(Field f, Options opt) : f_(std::move(f)), opt_(opt) {}

void Dopri5::start(double t0, const Vec& y0) {
    t_ = t0;
    y_ = y0;
    k1_ = f_(t0, y0);
    fresh_k1_ = true;
    h_next_ = opt_.initial_step;
    n_accept_ = n_reject_ = 0;
}

double Dopri5::initial_step_size(double t_limit) const {
    const double dir = (t_limit >= t_) ? 1.0 : -1.0;
    double d0 = 0.0, d1n = 0.0;
    for (Eigen::Index i = 0; i < y_.size(); ++i) {
        const double sc = opt_.atol + opt_.rtol * std::abs(y_[i]);
        d0 += (y_[i] / sc) * (y_[i] / sc);
        d1n += (k1_[i] / sc) * (k1_[i] / sc);
    }
    d0 = std::sqrt(d0 / y_.size());
    d1n = std::sqrt(d1n / y_.size());
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, std::abs(t_limit - t_));
    Vec y1 = y_ + dir * h0 * k1_;
    Vec f1 = f_(t_ + dir * h0, y1);
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < y_.size(); ++i) {
        const double sc = opt_.atol + opt_.rtol * std::abs(y_[i]);
        const double q = (f1[i] - k1_[i]) / sc;
        d2 += q * q;
    }
    d2 = std::sqrt(d2 / y_.size()) / h0;
    const double dm = std::max(d1n, d2);
    double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                              : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, opt_.max_step,
                     std::abs(t_limit - t_)});
}

bool Dopri5::step_to(double t_limit, DenseOutput& dense) {
    const double span = t_limit - t_;
    if (span == 0.0) return false;
    const double dir = (span > 0.0) ? 1.0 : -1.0;
    if (h_next_ == 0.0) h_next_ = initial_step_size(t_limit);
    double h = std::min({std::abs(h_next_), opt_.max_step, std::abs(span)});

    const Eigen::Index n = y_.size();
    Vec k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), y1(n), err(n);

    for (;;) {
        if (n_accept_ + n_reject_ >= opt_.max_steps)
            throw NumericsError("ode: step budget exhausted");
        const double hd = dir * h;
        if (std::abs(hd) <= 1e-14 * std::max(1.0, std::abs(t_)))
            throw NumericsError("ode: step size underflow");

        k2 = f_(t_ + c2 * hd, y_ + hd * (a21 * k1_));
        k3 = f_(t_ + c3 * hd, y_ + hd * (a31 * k1_ + a32 * k2));
        k4 = f_(t_ + c4 * hd, y_ + hd * (a41 * k1_ + a42 * k2 + a43 * k3));
        k5 = f_(t_ + c5 * hd,
                y_ + hd * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = f_(t_ + hd, y_ + hd * (a61 * k1_ + a62 * k2 + a63 * k3 +
                                    a64 * k4 + a65 * k5));
        y1 = y_ + hd * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = f_(t_ + hd, y1);
        err = hd * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 +
                    e7 * k7);
        const double en = error_norm(err, y_, y1, opt_.atol, opt_.rtol);
        if (en <= 1.0) {
            dense.t0 = t_;
            dense.h = hd;
            dense.cont[0] = y_;
            dense.cont[1] = y1 - y_;
            dense.cont[2] = hd * k1_ - dense.cont[1];
            dense.cont[3] = dense.cont[1] - hd * k7 - dense.cont[2];
            dense.cont[4] = hd * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 +
                                  d6 * k6 + d7 * k7);
            t_ += hd;
            y_ = y1;
            k1_ = k7;
            h_last_ = hd;
            ++n_accept_;
            const double fac =
                std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2,
                           5.0);
            h_next_ = std::min(h * fac, opt_.max_step);
            return true;
        }
        ++n_reject_;
        h *= std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.5);
    }
}

Vec Dopri5::fixed_step(const Field& f, double t, const Vec& y, double h) {
    const Vec k1 = f(t, y);
    const Vec k2 = f(t + c2 * h, y + h * (a21 * k1));
    const Vec k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vec k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 =
        f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                     a64 * k4 + a65 * k5));
    return y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
}

SmoothResult integrate_smooth(const Field& f, double t0, const Vec& y0,
                              double t1, const Options& opt,
                              const std::vector<EventSpec>& events) {
    SmoothResult out;
    Dopri5 stepper(f, opt);
    stepper.start(t0, y0);
    out.t.push_back(t0);
    out.y.push_back(y0);

    std::vector<double> g_prev(events.size());
    for (size_t i = 0; i < events.size(); ++i) g_prev[i] = events[i].g(t0, y0);

    DenseOutput dense;
    while (stepper.step_to(t1, dense)) {
        const double tn = stepper.t();
        const Vec& yn = stepper.y();
        for (size_t i = 0; i < events.size(); ++i) {
            const double gn = events[i].g(tn, yn);
            const bool flip =
                (events[i].direction >= 0 && g_prev[i] < 0.0 && gn >= 0.0) ||
                (events[i].direction <= 0 && g_prev[i] > 0.0 && gn <= 0.0);
            if (flip) {
                // Bisect the dense interpolant down to time tolerance.
                double lo = dense.t0, hi = tn;
                const double sgn = (g_prev[i] > 0.0) ? 1.0 : -1.0;
                for (int it = 0;
                     it < 200 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(hi));
                     ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (sgn * events[i].g(mid, dense(mid)) > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                out.event_hit = true;
                out.event_index = static_cast<int>(i);
                out.t_event = hi;
                out.y_event = dense(hi);
                out.t.push_back(hi);
                out.y.push_back(out.y_event);
                return out;
            }
            g_prev[i] = gn;
        }
        out.t.push_back(tn);
        out.y.push_back(yn);
    }
    return out;
}

}  // namespace pwsim::ode
