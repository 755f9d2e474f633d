#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sinai/decomp.hpp"
#include "sinai/env.hpp"
#include "sinai/events.hpp"

namespace sinai {

using json = nlohmann::json;

struct RunContext {
  std::uint64_t seed = 0;
  int threads = 0;       // 0: all available
  bool serial = false;   // use the serial reference loop
  Site site_budget = kDefaultSiteBudget;
};

struct EstimateResult {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;  // serialized as "stderr"
  std::int64_t N = 0;
  std::uint64_t seed = 0;
  json params = json::object();
};
json to_json(const EstimateResult& r);

// One suite's output document; rows become the CSV.
struct SuiteResult {
  std::string name;
  json params = json::object();
  std::uint64_t seed = 0;
  json rows = json::array();
  json summary = json::object();
  bool pass = false;
};
json to_json(const SuiteResult& r);
SuiteResult suite_from_json(const json& j);
std::string to_csv(const SuiteResult& r);

json to_json(const EnvLaw& law);

// Exclusion rate above which a suite fails regardless of its statistics.
inline constexpr double kMaxExclusionRate = 1e-3;

// Symmetric grid round(j h^2 / (10 sigma^2)), j = -20..20, deduplicated.
std::vector<Site> default_bh_grid(const EnvLaw& law, double h);

SuiteResult estimate_bh_law(const EnvLaw& law, double h, std::int64_t N, const std::vector<Site>& x_grid,
                            const RunContext& ctx);

SuiteResult check_renewal_identity(const EnvLaw& law, double h, std::int64_t N, const std::vector<Site>& x_grid,
                                   const RunContext& ctx);

// Means of l(T_up), l(T_down) for each h, the ratio for every pair (h, 2h) in
// h_values, and P(e <= delta) h / delta of the T_up excess over delta_grid.
SuiteResult estimate_slope_moments(const EnvLaw& law, const std::vector<double>& h_values, std::int64_t N,
                                   const std::vector<double>& delta_grid, const RunContext& ctx);

SuiteResult estimate_c_constants(const EnvLaw& law, double h, std::int64_t N, const std::vector<std::int64_t>& spitzer_x,
                                 std::int64_t N_spitzer, const RunContext& ctx);

// Path V(0..T_V(h)) from the first attempt that reaches [h, inf) before
// (-inf, 0) (Plain) or before (-inf, 0] after time 0 (Starred).
struct ConditionedSample {
  std::vector<double> path;
  std::int64_t attempts = 0;
};
ConditionedSample conditioned_walk_sample(const EnvLaw& law, double h, SlopeVariant variant, std::uint64_t seed,
                                          std::int64_t max_attempts = 10'000'000);

SuiteResult conditioned_law_check(const EnvLaw& law, double h, std::int64_t N, const RunContext& ctx);

SuiteResult event_frequencies(const EnvLaw& law, std::int64_t n, std::int64_t N, Site z, const EventParams& params,
                              const RunContext& ctx);

enum class EnvFilter { EC, None };

// Environments are drawn in index order until N are accepted or max_envs
// have been looked at.
SuiteResult coupling_experiment(const EnvLaw& law, std::int64_t n, std::int64_t N, Site z, const EventParams& params,
                                EnvFilter filter, std::int64_t max_envs, const RunContext& ctx);

enum class LltMethod { Direct, Proxy, Dp };
LltMethod llt_method_from_string(const std::string& s);
EnvFilter env_filter_from_string(const std::string& s);

// Proxy averages nu-hat(z) 1_{E_C(z)} (filter EC) or nu-hat(z) (filter None).
SuiteResult verify_sinai_llt(const EnvLaw& law, std::int64_t n, const std::vector<Site>& z_grid, std::int64_t N,
                             LltMethod method, EnvFilter filter, const EventParams& params, const RunContext& ctx);

// dp and direct on the same N environments, compared per z.
SuiteResult compare_llt_methods(const EnvLaw& law, std::int64_t n, const std::vector<Site>& z_grid, std::int64_t N,
                                const RunContext& ctx);

}  // namespace sinai
