#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "pwsim/config.hpp"
#include "pwsim/errors.hpp"

using namespace pwsim;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  std::filesystem::create_directories("cli_tmp");
  std::string so = "cli_tmp/out" + std::to_string(counter) + ".txt";
  std::string se = "cli_tmp/err" + std::to_string(counter) + ".txt";
  ++counter;
  std::string cmd =
      std::string(PWSIM_BIN) + " " + args + " >" + so + " 2>" + se;
  int rc = std::system(cmd.c_str());
  CliResult r;
  r.code = rc == -1 ? -1 : WEXITSTATUS(rc);
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

void put(const std::string& path, const std::string& text) {
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace

// -- config parsing (in-process) ----------------------------------------

TEST_CASE("config defaults survive an empty document") {
  auto cfg = parse_config_json("{\"version\":1}");
  CHECK(cfg.system == "welander-xy");
  CHECK(cfg.epsilon == 0.0);
  CHECK(cfg.formats == std::vector<std::string>{"csv"});
  validate(cfg);  // defaults must validate
}

TEST_CASE("unknown keys and wrong versions are rejected") {
  CHECK_THROWS_AS(parse_config_json("{\"version\":1,\"rtol \":1e-9}"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_json("{\"version\":3}"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("{}"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("not json at all"), ConfigError);
  CHECK_THROWS_AS(parse_config_json("{\"version\":1,\"rtol\":true}"),
                  ConfigError);
}

TEST_CASE("semantic validation catches impossible runs") {
  auto base = parse_config_json("{\"version\":1}");
  auto cfg = base;
  cfg.rtol = -1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = base;
  cfg.t1 = cfg.t0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = base;
  cfg.system = "blowup";
  cfg.a = 0.0;  // the compactified chart needs a positive layer width
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = base;
  cfg.formats = {"pdf"};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg = base;
  cfg.basename = "a/b";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("environment fills in, explicit values win") {
  setenv("PWSIM_SEED", "777", 1);
  setenv("PWSIM_FORMAT", "csv,svg", 1);
  auto cfg = parse_config_json("{\"version\":1}");
  apply_env(cfg);
  CHECK(cfg.seed == 777);
  CHECK(cfg.formats == std::vector<std::string>({"csv", "svg"}));
  unsetenv("PWSIM_SEED");
  unsetenv("PWSIM_FORMAT");
  setenv("PWSIM_THREADS", "zebra", 1);
  CHECK_THROWS_AS(apply_env(cfg), ConfigError);
  unsetenv("PWSIM_THREADS");
}

// -- full binary (subprocess) --------------------------------------------

TEST_SUITE("cli") {

TEST_CASE("version flag exits cleanly") {
  auto r = run_cli("--version");
  CHECK(r.code == 0);
  CHECK(r.out.find("pwsim") != std::string::npos);
}

TEST_CASE("unknown flags are a usage error") {
  auto r = run_cli("simulate --frobnicate");
  CHECK(r.code == 1);
}

TEST_CASE("missing config file maps to the io exit code") {
  auto r = run_cli("simulate --config cli_tmp/no-such-config.json");
  CHECK(r.code == 3);
  CHECK(r.err.find("io error") != std::string::npos);
}

TEST_CASE("malformed config maps to the config exit code") {
  put("cli_tmp/bad.json", "{\"version\":1,\"rtol\":\"tight\"}");
  auto r = run_cli("simulate --config cli_tmp/bad.json");
  CHECK(r.code == 1);
  CHECK(r.err.find("config error") != std::string::npos);
}

TEST_CASE("single passing criterion reports and exits zero") {
  auto r = run_cli("verify --criterion 4");
  CHECK(r.code == 0);
  CHECK(r.out.find("[PASS]") != std::string::npos);
  CHECK(r.out.find("pseudoequilibrium") != std::string::npos);
}

TEST_CASE("unattainable criterion fails loudly with the measured obstruction") {
  auto r = run_cli("verify --criterion 7");
  CHECK(r.code == 2);
  CHECK(r.out.find("[FAIL]") != std::string::npos);
  CHECK(r.out.find("no eigenvalue sign change") != std::string::npos);
}

TEST_CASE("identical configs give identical artifact bytes") {
  put("cli_tmp/run.json",
      "{\"version\":1,\"epsilon\":-0.02,\"t1\":10.0,"
      "\"initial\":[0.9,0.05],\"formats\":[\"csv\",\"svg\",\"json\"]}");
  auto r1 = run_cli("simulate --config cli_tmp/run.json --out cli_tmp/A");
  auto r2 = run_cli("simulate --config cli_tmp/run.json --out cli_tmp/B");
  CHECK(r1.code == 0);
  CHECK(r2.code == 0);
  for (const char* f : {"pwsim_trajectory.csv", "pwsim_events.csv",
                        "pwsim_trajectory.svg", "pwsim_summary.json"}) {
    auto a = slurp(std::string("cli_tmp/A/") + f);
    auto b = slurp(std::string("cli_tmp/B/") + f);
    CHECK(!a.empty());
    CHECK(a == b);
  }
}

TEST_CASE("stdout mode emits exactly the primary csv") {
  put("cli_tmp/run2.json",
      "{\"version\":1,\"epsilon\":-0.02,\"t1\":10.0,"
      "\"initial\":[0.9,0.05],\"formats\":[\"csv\"]}");
  auto file_run =
      run_cli("simulate --config cli_tmp/run2.json --out cli_tmp/C");
  auto pipe_run = run_cli("simulate --config cli_tmp/run2.json --stdout");
  CHECK(file_run.code == 0);
  CHECK(pipe_run.code == 0);
  CHECK(pipe_run.out == slurp("cli_tmp/C/pwsim_trajectory.csv"));
  CHECK(pipe_run.out.rfind("t,x0", 0) == 0);
}

TEST_CASE("environment variable steers the output directory") {
  put("cli_tmp/run3.json",
      "{\"version\":1,\"epsilon\":0.01,\"t1\":5.0,\"formats\":[\"csv\"]}");
  auto r = run_cli("simulate --config cli_tmp/run3.json");
  (void)r;
  auto env = run_cli(
      "simulate --config cli_tmp/run3.json");  // plain run for contrast
  setenv("PWSIM_OUT", "cli_tmp/ENV", 1);
  auto r2 = run_cli("simulate --config cli_tmp/run3.json");
  unsetenv("PWSIM_OUT");
  CHECK(r2.code == 0);
  CHECK(std::filesystem::exists("cli_tmp/ENV/pwsim_trajectory.csv"));
  // an explicit flag still beats the environment
  setenv("PWSIM_OUT", "cli_tmp/ENV2", 1);
  auto r3 = run_cli("simulate --config cli_tmp/run3.json --out cli_tmp/FLAG");
  unsetenv("PWSIM_OUT");
  CHECK(r3.code == 0);
  CHECK(std::filesystem::exists("cli_tmp/FLAG/pwsim_trajectory.csv"));
}

TEST_CASE("sliding report covers the requested offsets") {
  auto r = run_cli(
      "sliding --eps -0.02 --eps 0 --eps 0.02 --format csv --stdout");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("eps,x_k0,x_k1", 0) == 0);
  int lines = 0;
  for (char c : r.out)
    if (c == '\n') ++lines;
  CHECK(lines == 4);  // header + 3 rows
}

TEST_CASE("expansion table streams on stdout") {
  auto r = run_cli("blowup --format csv --stdout");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("coefficient,analytic,numeric,abs_error", 0) == 0);
}

TEST_CASE("scan produces the canonical csv") {
  auto r = run_cli("scan --eps -0.02 --eps 0.02 --format csv --stdout");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("a,eps,regime,attractor", 0) == 0);
}

TEST_CASE("scan without a grid is a configuration error") {
  auto r = run_cli("scan --format csv");
  CHECK(r.code == 1);
}

}  // TEST_SUITE("cli")
