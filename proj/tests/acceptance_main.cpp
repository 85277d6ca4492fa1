// Runs one verification criterion and reports a single pass/fail line.
// Usage: pwsim_acceptance <index 1..10>; exit 0 on pass, 1 on fail.
#include <cstdio>
#include <cstdlib>

#include "pwsim/selfcheck.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1..10>\n", argv[0]);
    return 2;
  }
  int idx = std::atoi(argv[1]);
  auto r = pwsim::check::criterion(idx);
  std::printf("[%s] %d %s (%.2fs): %s\n", r.pass ? "PASS" : "FAIL", idx,
              r.name.c_str(), r.seconds, r.detail.c_str());
  return r.pass ? 0 : 1;
}
