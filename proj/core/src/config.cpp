#include "pwsim/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pwsim/errors.hpp"

namespace pwsim {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

double want_number(const json& j, const std::string& key) {
  if (!j.is_number()) bad("key '" + key + "' must be a number");
  return j.get<double>();
}

std::string want_string(const json& j, const std::string& key) {
  if (!j.is_string()) bad("key '" + key + "' must be a string");
  return j.get<std::string>();
}

std::vector<double> want_number_list(const json& j, const std::string& key) {
  if (!j.is_array()) bad("key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) bad("key '" + key + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::string> want_string_list(const json& j,
                                          const std::string& key) {
  if (!j.is_array()) bad("key '" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) bad("key '" + key + "' must contain only strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

RunConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("config root must be a JSON object");

  RunConfig cfg;
  static const std::set<std::string> known = {
      "version",   "system",     "alpha",    "beta",    "epsilon",
      "a",         "rtol",       "atol",     "t0",      "t1",
      "sample_dt", "initial",    "eps_grid", "a_list",  "budget_seconds",
      "out_dir",   "formats",    "seed",     "threads", "basename"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) bad("unknown config key '" + it.key() + "'");

  if (!doc.contains("version"))
    bad("missing required key 'version'");
  {
    const auto& v = doc["version"];
    if (!v.is_number_integer()) bad("key 'version' must be an integer");
    cfg.version = v.get<int>();
  }
  if (cfg.version != 1)
    bad("unsupported config version " + std::to_string(cfg.version) +
        " (this build reads version 1)");

  if (doc.contains("system")) {
    cfg.system = want_string(doc["system"], "system");
    if (cfg.system == "custom")
      bad("system 'custom' is not available from config files; "
          "link against the library and construct a PiecewiseSystem "
          "directly");
  }
  if (doc.contains("alpha")) cfg.alpha = want_number(doc["alpha"], "alpha");
  if (doc.contains("beta")) cfg.beta = want_number(doc["beta"], "beta");
  if (doc.contains("epsilon"))
    cfg.epsilon = want_number(doc["epsilon"], "epsilon");
  if (doc.contains("a")) cfg.a = want_number(doc["a"], "a");
  if (doc.contains("rtol")) cfg.rtol = want_number(doc["rtol"], "rtol");
  if (doc.contains("atol")) cfg.atol = want_number(doc["atol"], "atol");
  if (doc.contains("t0")) cfg.t0 = want_number(doc["t0"], "t0");
  if (doc.contains("t1")) cfg.t1 = want_number(doc["t1"], "t1");
  if (doc.contains("sample_dt"))
    cfg.sample_dt = want_number(doc["sample_dt"], "sample_dt");
  if (doc.contains("initial"))
    cfg.initial = want_number_list(doc["initial"], "initial");
  if (doc.contains("eps_grid"))
    cfg.eps_grid = want_number_list(doc["eps_grid"], "eps_grid");
  if (doc.contains("a_list"))
    cfg.a_list = want_number_list(doc["a_list"], "a_list");
  if (doc.contains("budget_seconds"))
    cfg.budget_seconds = want_number(doc["budget_seconds"], "budget_seconds");
  if (doc.contains("out_dir"))
    cfg.out_dir = want_string(doc["out_dir"], "out_dir");
  if (doc.contains("formats"))
    cfg.formats = want_string_list(doc["formats"], "formats");
  if (doc.contains("seed")) {
    const auto& v = doc["seed"];
    if (!v.is_number_integer() || v.get<long long>() < 0)
      bad("key 'seed' must be a non-negative integer");
    cfg.seed = v.get<unsigned long>();
  }
  if (doc.contains("threads")) {
    const auto& v = doc["threads"];
    if (!v.is_number_integer()) bad("key 'threads' must be an integer");
    cfg.threads = v.get<int>();
  }
  if (doc.contains("basename"))
    cfg.basename = want_string(doc["basename"], "basename");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

void apply_env(RunConfig& cfg) {
  if (const char* v = std::getenv("PWSIM_OUT")) cfg.out_dir = v;
  if (const char* v = std::getenv("PWSIM_FORMAT")) {
    cfg.formats.clear();
    std::string s(v);
    size_t pos = 0;
    while (pos <= s.size()) {
      size_t comma = s.find(',', pos);
      std::string tok = s.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      if (!tok.empty()) cfg.formats.push_back(tok);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (const char* v = std::getenv("PWSIM_SEED")) {
    char* end = nullptr;
    unsigned long s = std::strtoul(v, &end, 10);
    if (end == v || *end != '\0')
      throw ConfigError("PWSIM_SEED must be a non-negative integer");
    cfg.seed = s;
  }
  if (const char* v = std::getenv("PWSIM_THREADS")) {
    char* end = nullptr;
    long t = std::strtol(v, &end, 10);
    if (end == v || *end != '\0')
      throw ConfigError("PWSIM_THREADS must be an integer");
    cfg.threads = static_cast<int>(t);
  }
}

void validate(const RunConfig& cfg) {
  static const std::set<std::string> systems = {"welander-xy", "welander-TS",
                                                "blowup"};
  if (!systems.count(cfg.system))
    bad("unknown system '" + cfg.system +
        "' (expected welander-xy, welander-TS, or blowup)");
  if (!(cfg.rtol > 0)) bad("rtol must be positive");
  if (!(cfg.atol > 0)) bad("atol must be positive");
  if (!(cfg.t1 > cfg.t0)) bad("t1 must exceed t0");
  if (cfg.sample_dt < 0) bad("sample_dt must be non-negative");
  if (!cfg.initial.empty() && cfg.initial.size() != 2)
    bad("initial must have exactly 2 entries");
  if (cfg.system == "blowup" && !(cfg.a > 0))
    bad("system 'blowup' requires a > 0");
  if (!(cfg.budget_seconds > 0)) bad("budget_seconds must be positive");
  if (cfg.threads < 1) bad("threads must be at least 1");
  static const std::set<std::string> fmts = {"csv", "svg", "json"};
  for (const auto& f : cfg.formats)
    if (!fmts.count(f))
      bad("unknown format '" + f + "' (expected csv, svg, or json)");
  if (cfg.formats.empty()) bad("formats must not be empty");
  if (cfg.basename.empty()) bad("basename must not be empty");
  for (char c : cfg.basename)
    if (c == '/' || c == '\\') bad("basename must not contain path separators");
}

}  // namespace pwsim
