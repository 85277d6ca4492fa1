#pragma once

#include <functional>

namespace pwsim {

struct RootOptions {
    double xtol = 1e-14;
    double ftol = 0.0;  // extra stop: |f| <= ftol (0 disables)
    int max_iter = 200;
};

// Brent's method on [a, b]. Requires f(a) and f(b) of opposite sign
// (throws BracketInvalid otherwise, NotConverged on iteration overflow).
double brent(const std::function<double(double)>& f, double a, double b,
             const RootOptions& opt = {});

// Like brent() but takes precomputed endpoint values.
double brent(const std::function<double(double)>& f, double a, double b,
             double fa, double fb, const RootOptions& opt = {});

}  // namespace pwsim
