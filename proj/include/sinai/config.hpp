#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sinai/experiments.hpp"

namespace sinai {

// One suite invocation. Everything except the common keys lives in `params`
// and is validated against the suite's key list when parsed.
struct RunConfig {
  std::string suite;
  std::string label;   // file stem; defaults to the suite name
  std::uint64_t seed = 0;
  std::optional<EnvLaw> law;
  int threads = 0;
  Site site_budget = kDefaultSiteBudget;
  json params = json::object();
};

// Throws ConfigError naming the offending key. Suite "all" expands its
// "runs" array; each entry inherits seed, law, threads and site_budget.
std::vector<RunConfig> parse_run_config(const json& j);
std::vector<RunConfig> load_run_config(const std::filesystem::path& path);

SuiteResult run_suite(const RunConfig& cfg, bool serial = false);

// <dir>/<label>.json and <dir>/<label>.csv, each written to a temporary file
// first and renamed into place.
void write_result(const std::filesystem::path& dir, const std::string& label, const SuiteResult& r);
void write_atomic(const std::filesystem::path& file, const std::string& contents);

struct Report {
  std::string markdown;
  int suites = 0;
  int failing = 0;
  int malformed = 0;
  int exit_code() const noexcept { return malformed ? 1 : failing ? 2 : 0; }
};
Report emit_report(const std::filesystem::path& dir);

// CSV x,phi,error_bound over [from, to] in steps of `step`.
std::string density_table(double from, double to, double step, double tol);

}  // namespace sinai
