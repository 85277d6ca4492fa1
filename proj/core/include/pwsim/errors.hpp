#pragma once

#include <stdexcept>
#include <string>

namespace pwsim {

// Error hierarchy. The three roots map onto the CLI exit codes:
// ConfigError -> 1, NumericsError -> 2, IoError -> 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation outside a declared domain (k-guard, phi_inv range, ...).
struct DomainError : NumericsError {
    using NumericsError::NumericsError;
};

// Both one-sided normal components vanish at the same boundary point.
struct DegenerateContact : NumericsError {
    using NumericsError::NumericsError;
};

// sliding_flow requested where no sliding solution exists.
struct NotInSlidingRegion : NumericsError {
    using NumericsError::NumericsError;
};

// Poincare map: trajectory never returned to the section.
struct NoReturn : NumericsError {
    using NumericsError::NumericsError;
};

// Root bracketing precondition violated (no sign change).
struct BracketInvalid : NumericsError {
    using NumericsError::NumericsError;
};

// Iteration failed to converge; carries the best iterate seen.
struct NotConverged : NumericsError {
    double best;
    explicit NotConverged(const std::string& msg, double best_iterate = 0.0)
        : NumericsError(msg), best(best_iterate) {}
};

// Eigenvalue crossing (or similar feature) absent from the scanned range.
struct NotFound : NumericsError {
    using NumericsError::NumericsError;
};

// No equilibrium root inside the admissible domain.
struct NoRootInDomain : NumericsError {
    using NumericsError::NumericsError;
};

// Fast-slow layer: critical manifold loses normal hyperbolicity.
struct NonHyperbolic : NumericsError {
    using NumericsError::NumericsError;
};

}  // namespace pwsim
