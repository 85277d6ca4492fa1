#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pwsim::scan {

// Caps the integration effort spent on one scan point (all seeds
// together), expressed in seconds of a nominal step rate.
struct Budget {
  double seconds = 2.0;
  double steps_per_second = 200000;
  long long max_steps() const {
    return static_cast<long long>(seconds * steps_per_second);
  }
};

enum class Regime { NonsmoothFilippov, Smooth };

enum class Attractor {
  SlidingPoint,      // trajectory ends on the manifold in stable sliding
  FocusPoint,        // spiral contraction onto a point
  PeriodicOrbit,
  EquilibriumPoint,  // smooth regime, eigenvalues in the left half plane
  Undetermined,
};

const char* to_string(Regime r);
const char* to_string(Attractor a);

struct ScanPoint {
  double a = 0.0;  // 0 in the nonsmooth regime
  double eps = 0.0;
  Regime regime = Regime::NonsmoothFilippov;
  Attractor attractor = Attractor::Undetermined;
  std::optional<double> orbit_amplitude;
  std::optional<double> eigen_real;
  std::optional<double> eigen_imag;
  std::optional<double> slide_lo;
  std::optional<double> slide_hi;
};

struct Bifurcation {
  std::string kind;  // fused-focus | smooth-hopf
  double a = 0.0;
  double eps = 0.0;
};

struct BifurcationDiagram {
  std::vector<ScanPoint> points;  // sorted by (a, eps)
  std::vector<Bifurcation> bifurcations;
  std::vector<std::string> failures;
};

// Classify the attractor of the discontinuous system over an epsilon
// grid: four fixed seeds per point, classification by terminal mode and
// return-map convergence. Deterministic for any thread count.
BifurcationDiagram scan_nonsmooth(const std::vector<double>& eps_grid,
                                  const Budget& budget = {}, int threads = 1);

// Equilibrium stability of the smoothed system over an (a, eps) grid;
// eigenvalue sign changes along eps are refined into Hopf points. Orbit
// amplitudes for unstable points are measured only when requested.
BifurcationDiagram scan_smooth(const std::vector<double>& a_list,
                               const std::vector<double>& eps_grid,
                               int threads = 1,
                               bool measure_amplitudes = false);

// Canonical data product. Header row plus one line per point, %.12g,
// empty fields for absent optionals. Byte-stable for identical inputs.
std::string to_csv(const BifurcationDiagram& d);

std::string to_json_summary(const BifurcationDiagram& d);

}  // namespace pwsim::scan
