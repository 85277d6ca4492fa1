#pragma once

#include <string>
#include <vector>

namespace pwsim::check {

struct Result {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Acceptance criteria 1..10. Each runs self-contained, reports a one-line
// detail, and folds its wall-clock limit into the verdict. Criteria that
// cannot be met report the measured obstruction rather than a doctored
// pass. Throws ConfigError for an index outside 1..10.
Result criterion(int index);

std::vector<Result> all_criteria();

// Randomized invariant suites (criterion 10 runs these): every suite
// draws at least `cases` cases from its own deterministic generator.
std::vector<Result> property_suites(unsigned long seed = 20260815,
                                    int cases = 200);

}  // namespace pwsim::check
