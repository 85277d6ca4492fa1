#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <limits>
#include <vector>

namespace pwsim::ode {

using Vec = Eigen::VectorXd;
using Field = std::function<Vec(double t, const Vec& y)>;

struct Options {
    double rtol = 1e-9;
    double atol = 1e-11;
    double max_step = std::numeric_limits<double>::infinity();
    double initial_step = 0.0;  // 0: choose automatically
    long max_steps = 50'000'000;
};

// Quartic interpolant over one accepted step, valid on [t0, t0+h].
struct DenseOutput {
    double t0 = 0.0, h = 0.0;
    std::array<Vec, 5> cont;

    Vec operator()(double t) const;
    double t1() const { return t0 + h; }
};

// Dormand-Prince 5(4) embedded pair with FSAL and dense output.
class Dopri5 {
  public:
    Dopri5(Field f, Options opt = {});

    void start(double t0, const Vec& y0);

    // Advance one accepted step, never stepping past t_limit.
    // Returns false when already at t_limit. Throws NumericsError on
    // step-size underflow or step-count overflow.
    bool step_to(double t_limit, DenseOutput& dense);

    // Single classical step of the order-5 formula, no error control.
    static Vec fixed_step(const Field& f, double t, const Vec& y, double h);

    double t() const { return t_; }
    const Vec& y() const { return y_; }
    double last_step() const { return h_last_; }
    long n_accepted() const { return n_accept_; }
    long n_rejected() const { return n_reject_; }

  private:
    Field f_;
    Options opt_;
    double t_ = 0.0, h_next_ = 0.0, h_last_ = 0.0;
    Vec y_, k1_;
    bool fresh_k1_ = false;
    long n_accept_ = 0, n_reject_ = 0;

    double initial_step_size(double t_limit) const;
};

// Integrate a smooth field over [t0, t1], recording every accepted step.
struct SmoothResult {
    std::vector<double> t;
    std::vector<Vec> y;
    bool event_hit = false;
    int event_index = -1;
    double t_event = 0.0;
    Vec y_event;
};

struct EventSpec {
    std::function<double(double, const Vec&)> g;
    int direction = 0;  // +1: - to +, -1: + to -, 0: either
};

SmoothResult integrate_smooth(const Field& f, double t0, const Vec& y0,
                              double t1, const Options& opt = {},
                              const std::vector<EventSpec>& events = {});

}  // namespace pwsim::ode
