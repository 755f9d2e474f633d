#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sinai/env.hpp"

namespace sinai {

struct WalkResult {
  Site endpoint = 0;
  // First time each requested target was visited (k >= 0), if within n steps.
  std::vector<std::optional<std::int64_t>> first_hits;
};

// n steps of S under P_omega^start; one uniform per step from the stream
// keyed by `seed`. Sampled windows grow on demand.
WalkResult simulate_walk(const PotentialWindow& w, Site start, std::int64_t n, std::uint64_t seed,
                         std::span<const Site> targets = {}, Site site_budget = kDefaultSiteBudget);

enum class HitVariant { Hit, Return };  // tau(y): k >= 0; tau*(y): k >= 1

struct HitResult {
  std::int64_t time = 0;
  bool censored = false;  // cap reached before the target
};

HitResult hitting_time(const PotentialWindow& w, Site start, Site target, std::int64_t cap, std::uint64_t seed,
                       HitVariant variant = HitVariant::Hit, Site site_budget = kDefaultSiteBudget);

// First exit time of [a, c] started inside, i.e. tau(a) ^ tau(c); censored at cap.
HitResult exit_time(const PotentialWindow& w, Site start, Site a, Site c, std::int64_t cap, std::uint64_t seed);

// The (log n)-central valley and the coupling start.
struct CentralValley {
  std::int64_t n = 0;
  double h = 0.0;        // log n
  Site b = 0;            // b_{log n}
  Site b_hat = 0;        // 2 floor(b/2) + 1_{n odd}
  Site m_minus = 0, m_plus = 0;
  Site x_minus3 = 0, x_plus3 = 0;  // x_{-3}, x_3 at height log n (DP range)
  std::shared_ptr<const PotentialWindow> window;  // grown to cover all of the above
};
CentralValley central_valley(const PotentialWindow& w, std::int64_t n, Site site_budget = kDefaultSiteBudget);

struct CouplingRecord {
  std::optional<std::int64_t> tau_meet;
  std::optional<std::int64_t> tau_exit;  // within the horizon
  Site s_endpoint = 0;
  Site shat_endpoint = 0;
  Site shat_start = 0;
  std::int64_t horizon = 0;
  std::vector<Site> s_path, shat_path;  // only when requested
};

// S from b_hat(n) in omega, S-hat from nu-hat in omega-hat (reflected at M-, M+);
// independent until they meet, locked until S leaves [M-, M+], then
// independent again. Streams: S uses derive_key(seed, 1), S-hat derive_key(seed, 2),
// the draw of S-hat_0 derive_key(seed, 3).
CouplingRecord simulate_coupling(const CentralValley& valley, std::uint64_t seed,
                                 bool keep_paths = false, Site site_budget = kDefaultSiteBudget);
CouplingRecord simulate_coupling(const PotentialWindow& w, std::int64_t n, std::uint64_t seed);

}  // namespace sinai
