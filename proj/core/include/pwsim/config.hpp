#pragma once

#include <optional>
#include <string>
#include <vector>

namespace pwsim {

// Run description parsed from a JSON config file. Defaults here are the
// baseline; file values override them, then environment variables
// (PWSIM_OUT, PWSIM_FORMAT, PWSIM_SEED, PWSIM_THREADS), then CLI flags.
struct RunConfig {
  int version = 1;
  std::string system = "welander-xy";  // welander-xy | welander-TS | blowup
  double alpha = 0.8;
  double beta = 0.5;
  double epsilon = 0.0;
  double a = 0.0;

  double rtol = 1e-9;
  double atol = 1e-11;
  double t0 = 0.0;
  double t1 = 100.0;
  double sample_dt = 0.0;
  std::vector<double> initial;  // length 2; chart given by `system`

  std::vector<double> eps_grid;
  std::vector<double> a_list;
  double budget_seconds = 2.0;

  std::string out_dir = ".";
  std::vector<std::string> formats = {"csv"};  // csv | svg | json
  unsigned long seed = 12345;
  int threads = 1;
  std::string basename = "pwsim";
};

// Parse a JSON document. Throws ConfigError on: malformed JSON, unknown
// keys anywhere in the tree, wrong value types, or unsupported version.
RunConfig parse_config_json(const std::string& text);

// Read a file and parse it. Throws IoError if unreadable.
RunConfig load_config(const std::string& path);

// Overlay PWSIM_* environment variables onto `cfg`.
void apply_env(RunConfig& cfg);

// Validate cross-field constraints (t1>t0, rtol>0, known system, ...).
// Throws ConfigError with a message naming the offending key.
void validate(const RunConfig& cfg);

}  // namespace pwsim
