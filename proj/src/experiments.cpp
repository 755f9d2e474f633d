#include "sinai/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "sinai/error.hpp"
#include "sinai/kesten.hpp"
#include "sinai/parallel.hpp"
#include "sinai/quenched.hpp"
#include "sinai/rng.hpp"
#include "sinai/stats.hpp"
#include "sinai/walker.hpp"

namespace sinai {

json to_json(const EstimateResult& r) {
  return json{{"name", r.name}, {"estimate", r.estimate}, {"stderr", r.std_error},
              {"N", r.N},       {"seed", r.seed},         {"params", r.params}};
}

json to_json(const SuiteResult& r) {
  return json{{"schema", 1},      {"name", r.name},       {"params", r.params}, {"seed", r.seed},
              {"rows", r.rows},   {"summary", r.summary}, {"pass", r.pass}};
}

SuiteResult suite_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", 0) != 1)
    throw Error(ErrorCode::IoError, "not a schema-1 result document");
  SuiteResult r;
  r.name = j.at("name").get<std::string>();
  r.params = j.at("params");
  r.seed = j.at("seed").get<std::uint64_t>();
  r.rows = j.at("rows");
  r.summary = j.value("summary", json::object());
  r.pass = j.at("pass").get<bool>();
  return r;
}

namespace {

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

}  // namespace

std::string to_csv(const SuiteResult& r) {
  std::ostringstream os;
  if (r.rows.empty()) return "";
  std::vector<std::string> cols;
  for (auto it = r.rows.front().begin(); it != r.rows.front().end(); ++it) cols.push_back(it.key());
  for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << csv_cell(row.value(cols[c], json()));
    os << '\n';
  }
  return os.str();
}

json to_json(const EnvLaw& law) {
  return json{{"kind", to_string(law.kind)}, {"param", law.param}, {"sigma", law.sigma}};
}

namespace {

template <class T, class F>
std::vector<T> replicate(const RunContext& ctx, std::int64_t n, F&& f) {
  return ctx.serial ? map_replicates_serial<T>(n, f) : map_replicates<T>(n, ctx.threads, f);
}

// Budget overflows exclude the replicate; anything else is a real failure.
template <class F>
auto excluded_on_budget(F&& f) -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ExtensionBudgetExceeded) return std::nullopt;
    throw;
  }
}

Site half_width(const EnvLaw& law, double h) {
  return static_cast<Site>(std::ceil(2 * h * h / (law.sigma * law.sigma))) + 16;
}

PotentialWindow env_for(const EnvLaw& law, std::uint64_t seed, Site half) {
  return PotentialWindow::sample(law, seed, -half, half);
}

ScanOptions scan_opts(const RunContext& ctx) { return ScanOptions{ctx.site_budget, 1}; }

template <class T>
std::int64_t count_missing(const std::vector<std::optional<T>>& v) {
  return std::count_if(v.begin(), v.end(), [](const auto& o) { return !o.has_value(); });
}

json mean_json(const MeanEstimate& m) { return json{{"estimate", m.mean}, {"stderr", m.se}, {"N", m.n}}; }

bool within(double a, double b, double se, double width = 3.0) { return std::fabs(a - b) <= width * se; }

json base_params(const EnvLaw& law) { return json{{"law", to_json(law)}}; }

std::vector<std::optional<Site>> sample_b_h(const EnvLaw& law, double h, std::int64_t n, std::uint64_t key,
                                            const RunContext& ctx) {
  const Site half = half_width(law, h);
  return replicate<std::optional<Site>>(ctx, n, [&](std::int64_t i) {
    return excluded_on_budget([&] { return compute_b_h(env_for(law, derive_key(key, i), half), h, scan_opts(ctx)); });
  });
}

}  // namespace

std::vector<Site> default_bh_grid(const EnvLaw& law, double h) {
  std::vector<Site> g;
  for (int j = -20; j <= 20; ++j)
    g.push_back(static_cast<Site>(std::llround(j * h * h / (10 * law.sigma * law.sigma))));
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

SuiteResult estimate_bh_law(const EnvLaw& law, double h, std::int64_t N, const std::vector<Site>& x_grid,
                            const RunContext& ctx) {
  if (!(h > 0) || N < 1) throw Error(ErrorCode::RangeError, "estimate_bh_law needs h > 0 and N >= 1");
  SuiteResult r;
  r.name = "bh-llt";
  r.seed = ctx.seed;
  r.params = base_params(law);
  r.params["h"] = h;
  r.params["N"] = N;
  r.params["x_grid"] = x_grid;

  const auto bs = sample_b_h(law, h, N, derive_key(ctx.seed, 0), ctx);
  const std::int64_t excluded = count_missing(bs);
  const std::int64_t used = N - excluded;
  std::map<Site, std::int64_t> counts;
  for (Site x : x_grid) counts[x] = 0;
  std::int64_t positive = 0, in_grid = 0;
  for (const auto& b : bs) {
    if (!b) continue;
    if (*b > 0) ++positive;
    if (auto it = counts.find(*b); it != counts.end()) {
      ++it->second;
      ++in_grid;
    }
  }
  double sup = 0.0;
  std::vector<std::pair<Site, MeanEstimate>> est;
  for (auto [x, k] : counts) {
    const MeanEstimate m = binomial_estimate(k, used);
    const double pred = llt_prediction(LltMode::Bottom, static_cast<double>(x), law.sigma, h);
    sup = std::max(sup, std::fabs(m.mean - pred));
    est.emplace_back(x, m);
    r.rows.push_back(json{{"x", x},
                          {"count", k},
                          {"p_hat", m.mean},
                          {"stderr", m.se},
                          {"prediction", pred},
                          {"scaled_error", h * h * (m.mean - pred)}});
  }
  // Away from 0 the law decreases on both sides; allow 3 combined stderr.
  bool monotone = true;
  for (std::size_t j = 0; j + 1 < est.size(); ++j) {
    const auto& [x, a] = est[j];
    const auto& [y, b] = est[j + 1];
    const double se = combined_se(a.se, b.se);
    if (x >= 0 && b.mean > a.mean + 3 * se) monotone = false;
    if (y <= 0 && a.mean > b.mean + 3 * se) monotone = false;
  }
  const double excl_rate = static_cast<double>(excluded) / N;
  r.summary = json{{"N", N},
                   {"excluded", excluded},
                   {"in_grid", in_grid},
                   {"overflow", used - in_grid},
                   {"D", h * h * sup},
                   {"p_positive", mean_json(binomial_estimate(positive, used))},
                   {"monotone", monotone},
                   {"exclusion_rate", excl_rate}};
  r.pass = monotone && excl_rate < kMaxExclusionRate;
  return r;
}

namespace {

struct SlopeLengths {
  Site up = 0, down = 0;
  double excess_up = 0.0;
  Site up_first_passage = 0;
};

std::vector<std::optional<SlopeLengths>> sample_slopes(const EnvLaw& law, double h, std::int64_t n, std::uint64_t key,
                                                       const RunContext& ctx) {
  return replicate<std::optional<SlopeLengths>>(ctx, n, [&](std::int64_t i) {
    return excluded_on_budget([&] {
      const auto w = PotentialWindow::sample(law, derive_key(key, i), 0, half_width(law, h));
      const auto cs = extract_canonical_slopes(w, h, SlopeVariant::Plain, scan_opts(ctx));
      return SlopeLengths{cs.up.length(), cs.down.length(), cs.up.height() - h, cs.up.first_passage(h)};
    });
  });
}

}  // namespace

SuiteResult check_renewal_identity(const EnvLaw& law, double h, std::int64_t N, const std::vector<Site>& x_grid,
                                   const RunContext& ctx) {
  if (!(h > 0) || N < 1) throw Error(ErrorCode::RangeError, "check_renewal_identity needs h > 0 and N >= 1");
  SuiteResult r;
  r.name = "renewal";
  r.seed = ctx.seed;
  r.params = base_params(law);
  r.params["h"] = h;
  r.params["N"] = N;
  r.params["x_grid"] = x_grid;

  const auto bs = sample_b_h(law, h, N, derive_key(ctx.seed, 1), ctx);
  const auto sl = sample_slopes(law, h, N, derive_key(ctx.seed, 2), ctx);
  const std::int64_t excl_l = count_missing(bs), excl_r = count_missing(sl);
  const std::int64_t nl = N - excl_l, nr = N - excl_r;

  std::vector<double> total;
  total.reserve(sl.size());
  for (const auto& s : sl)
    if (s) total.push_back(static_cast<double>(s->up + s->down));
  const MeanEstimate B = mean_estimate(total);

  bool all_ok = true;
  for (Site x : x_grid) {
    std::int64_t k = 0;
    for (const auto& b : bs) k += (b && *b == x);
    const MeanEstimate lhs = binomial_estimate(k, nl);
    // Ratio A/B with the delta method on paired samples: var(a - R b) / (n B^2).
    std::vector<double> a;
    a.reserve(total.size());
    for (const auto& s : sl) {
      if (!s) continue;
      a.push_back(x >= 0 ? (s->down >= x ? 1.0 : 0.0) : (s->up > -x ? 1.0 : 0.0));
    }
    const double A = mean_estimate(a).mean;
    const double R = A / B.mean;
    std::vector<double> resid(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) resid[j] = a[j] - R * total[j];
    const double rhs_se = mean_estimate(resid).se / B.mean;
    const double se = combined_se(lhs.se, rhs_se);
    const bool ok = within(lhs.mean, R, se);
    all_ok = all_ok && ok;
    r.rows.push_back(json{{"x", x},
                          {"lhs", lhs.mean},
                          {"lhs_stderr", lhs.se},
                          {"rhs", R},
                          {"rhs_stderr", rhs_se},
                          {"combined_stderr", se},
                          {"z", se > 0 ? (lhs.mean - R) / se : 0.0},
                          {"ok", ok}});
  }
  std::int64_t k0 = 0;
  for (const auto& b : bs) k0 += (b && *b == 0);
  const MeanEstimate p0 = binomial_estimate(k0, nl);
  const double prod = p0.mean * B.mean;
  const double prod_se = combined_se(p0.se * B.mean, p0.mean * B.se);
  const bool zero_ok = within(prod, 1.0, prod_se);
  const double excl_rate = static_cast<double>(excl_l + excl_r) / (2.0 * N);
  r.summary = json{{"excluded_lhs", excl_l},
                   {"excluded_rhs", excl_r},
                   {"mean_total_length", mean_json(B)},
                   {"p0_times_mean_length", prod},
                   {"p0_times_mean_length_stderr", prod_se},
                   {"x0_consistent", zero_ok},
                   {"exclusion_rate", excl_rate}};
  r.pass = all_ok && zero_ok && excl_rate < kMaxExclusionRate;
  (void)nr;
  return r;
}

SuiteResult estimate_slope_moments(const EnvLaw& law, const std::vector<double>& h_values, std::int64_t N,
                                   const std::vector<double>& delta_grid, const RunContext& ctx) {
  if (h_values.empty() || N < 2) throw Error(ErrorCode::RangeError, "estimate_slope_moments needs h values and N >= 2");
  SuiteResult r;
  r.name = "slopes";
  r.seed = ctx.seed;
  r.params = base_params(law);
  r.params["h_values"] = h_values;
  r.params["N"] = N;
  r.params["delta_grid"] = delta_grid;

  bool pass = true;
  std::int64_t excluded = 0;
  std::map<double, MeanEstimate> up_means;
  json excess = json::array();
  for (std::size_t hi = 0; hi < h_values.size(); ++hi) {
    const double h = h_values[hi];
    if (!(h > 0)) throw Error(ErrorCode::RangeError, "slope heights must be positive");
    const auto sl = sample_slopes(law, h, N, derive_key(ctx.seed, hi), ctx);
    excluded += count_missing(sl);
    std::vector<double> up, down, e;
    for (const auto& s : sl) {
      if (!s) continue;
      up.push_back(static_cast<double>(s->up));
      down.push_back(static_cast<double>(s->down));
      e.push_back(s->excess_up);
    }
    const MeanEstimate mu = mean_estimate(up), md = mean_estimate(down);
    up_means[h] = mu;
    const double se = combined_se(mu.se, md.se);
    const bool ok = within(mu.mean, md.mean, se);
    pass = pass && ok;
    r.rows.push_back(json{{"h", h},
                          {"mean_up", mu.mean},
                          {"mean_up_stderr", mu.se},
                          {"mean_down", md.mean},
                          {"mean_down_stderr", md.se},
                          {"z", se > 0 ? (mu.mean - md.mean) / se : 0.0},
                          {"up_over_h2", mu.mean / (h * h)},
                          {"ok", ok}});
    for (double d : delta_grid) {
      const auto k = std::count_if(e.begin(), e.end(), [&](double v) { return v <= d; });
      const MeanEstimate p = binomial_estimate(k, static_cast<std::int64_t>(e.size()));
      excess.push_back(json{{"h", h}, {"delta", d}, {"p_hat", p.mean}, {"stderr", p.se}, {"scaled", p.mean * h / d}});
    }
  }
  json ratios = json::array();
  for (auto [h, m] : up_means) {
    auto it = up_means.find(2 * h);
    if (it == up_means.end()) continue;
    const double ratio = it->second.mean / m.mean;
    const double se = ratio * std::sqrt(std::pow(it->second.se / it->second.mean, 2) + std::pow(m.se / m.mean, 2));
    const bool ok = ratio >= 3.5 && ratio <= 4.5;
    pass = pass && ok;
    ratios.push_back(json{{"h", h}, {"ratio", ratio}, {"stderr", se}, {"ok", ok}});
  }
  const double excl_rate = static_cast<double>(excluded) / (N * static_cast<double>(h_values.size()));
  r.summary = json{{"ratios", ratios}, {"excess_cdf", excess}, {"excluded", excluded}, {"exclusion_rate", excl_rate}};
  r.pass = pass && excl_rate < kMaxExclusionRate;
  return r;
}

namespace {

// True when V started at 0 reaches [h, inf) before (-inf, 0) (strict = false)
// or before (-inf, 0] at times >= 1 (strict = true).
bool reaches_before_zero(const EnvLaw& law, std::uint64_t seed, double h, bool strict) {
  RightPotential v(law, seed);
  for (;;) {
    const double x = v.next();
    if (x >= h) return true;
    if (strict ? x <= 0 : x < 0) return false;
  }
}

}  // namespace

SuiteResult estimate_c_constants(const EnvLaw& law, double h, std::int64_t N, const std::vector<std::int64_t>& spitzer_x,
                                 std::int64_t N_spitzer, const RunContext& ctx) {
  if (!(h > 0) || N < 2) throw Error(ErrorCode::RangeError, "estimate_c_constants needs h > 0 and N >= 2");
  SuiteResult r;
  r.name = "constants";
  r.seed = ctx.seed;
  r.params = base_params(law);
  r.params["h"] = h;
  r.params["N"] = N;
  r.params["spitzer_x"] = spitzer_x;
  r.params["N_spitzer"] = N_spitzer;

  auto freq = [&](std::uint64_t key, bool strict) {
    const auto hits = replicate<char>(ctx, N, [&](std::int64_t i) {
      return static_cast<char>(reaches_before_zero(law, derive_key(key, i), h, strict));
    });
    return binomial_estimate(std::count(hits.begin(), hits.end(), 1), N);
  };
  const MeanEstimate p1 = freq(derive_key(ctx.seed, 1), false);
  const MeanEstimate p1s = freq(derive_key(ctx.seed, 2), true);
  const double c1 = h * p1.mean, c1_se = h * p1.se;
  const double c1s = h * p1s.mean, c1s_se = h * p1s.se;

  const auto bs = sample_b_h(law, h, N, derive_key(ctx.seed, 3), ctx);
  const std::int64_t excluded = count_missing(bs);
  std::int64_t zero = 0, positive = 0;
  for (const auto& b : bs) {
    zero += (b && *b == 0);
    positive += (b && *b > 0);
  }
  const MeanEstimate p0 = binomial_estimate(zero, N - excluded);
  const MeanEstimate ppos = binomial_estimate(positive, N - excluded);
  const double c6 = h * h * p0.mean, c6_se = h * h * p0.se;
  const double prod = c1 * c1s, prod_se = combined_se(c1 * c1s_se, c1s * c1_se);
  const double c6_se_comb = combined_se(c6_se, prod_se);
  const bool c6_ok = within(c6, prod, c6_se_comb);
  const bool ppos_ok = ppos.mean >= 0.47 && ppos.mean <= 0.53;

  // Spitzer: P(V(k) >= 0 for 1 <= k <= x) sqrt(x).
  bool plateau_ok = true;
  json spitzer = json::array();
  if (!spitzer_x.empty() && N_spitzer > 0) {
    const std::int64_t xmax = *std::max_element(spitzer_x.begin(), spitzer_x.end());
    const std::uint64_t key = derive_key(ctx.seed, 4);
    const auto survival = replicate<std::int64_t>(ctx, N_spitzer, [&](std::int64_t i) {
      RightPotential v(law, derive_key(key, i));
      while (v.position() < xmax)
        if (v.next() < 0) return v.position() - 1;
      return xmax;
    });
    double lo = INFINITY, hi = -INFINITY;
    for (std::int64_t x : spitzer_x) {
      const auto k = std::count_if(survival.begin(), survival.end(), [&](std::int64_t s) { return s >= x; });
      const MeanEstimate p = binomial_estimate(k, N_spitzer);
      const double s = p.mean * std::sqrt(static_cast<double>(x));
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      spitzer.push_back(json{{"x", x}, {"p_hat", p.mean}, {"stderr", p.se}, {"scaled", s}});
    }
    plateau_ok = lo > 0 && hi / lo - 1 < 0.15;
  }

  auto est = [&](const char* name, double v, double se, std::int64_t n) {
    return to_json(EstimateResult{name, v, se, n, ctx.seed, json{{"h", h}}});
  };
  r.rows = json::array({est("c1", c1, c1_se, N), est("c1_star", c1s, c1s_se, N), est("c6", c6, c6_se, N - excluded),
                        est("c1_c1_star", prod, prod_se, N), est("p_bh_positive", ppos.mean, ppos.se, N - excluded)});
  const double excl_rate = static_cast<double>(excluded) / N;
  r.summary = json{{"c6_consistent", c6_ok},
                   {"c6_combined_stderr", c6_se_comb},
                   {"p_positive_in_window", ppos_ok},
                   {"spitzer", spitzer},
                   {"spitzer_plateau", plateau_ok},
                   {"excluded", excluded},
                   {"exclusion_rate", excl_rate}};
  r.pass = c6_ok && ppos_ok && plateau_ok && excl_rate < kMaxExclusionRate;
  return r;
}

ConditionedSample conditioned_walk_sample(const EnvLaw& law, double h, SlopeVariant variant, std::uint64_t seed,
                                          std::int64_t max_attempts) {
  if (!(h > 0)) throw Error(ErrorCode::RangeError, "conditioned_walk_sample needs h > 0");
  const bool strict = variant == SlopeVariant::Starred;
  for (std::int64_t a = 0; a < max_attempts; ++a) {
    RightPotential v(law, derive_key(seed, static_cast<std::uint64_t>(a)));
    std::vector<double> path{0.0};
    for (;;) {
      const double x = v.next();
      path.push_back(x);
      if (x >= h) return ConditionedSample{std::move(path), a + 1};
      if (strict ? x <= 0 : x < 0) break;
    }
  }
  throw Error(ErrorCode::RejectionBudgetExceeded,
              "no accepted path in " + std::to_string(max_attempts) + " attempts at h = " + std::to_string(h));
}

SuiteResult conditioned_law_check(const EnvLaw& law, double h, std::int64_t N, const RunContext& ctx) {
  SuiteResult r;
  r.name = "conditioned";
  r.seed = ctx.seed;
  r.params = base_params(law);
  r.params["h"] = h;
  r.params["N"] = N;

  const std::uint64_t key = derive_key(ctx.seed, 1);
  const auto samples = replicate<std::pair<double, std::int64_t>>(ctx, N, [&](std::int64_t i) {
    const auto s = conditioned_walk_sample(law, h, SlopeVariant::Plain, derive_key(key, i));
    return std::pair{static_cast<double>(s.path.size() - 1), s.attempts};
  });
  std::vector<double> cond;
  std::int64_t attempts = 0;
  for (auto [len, a] : samples) {
    cond.push_back(len);
    attempts += a;
  }
  const auto sl = sample_slopes(law, h, N, derive_key(ctx.seed, 2), ctx);
  std::vector<double> prefix;
  for (const auto& s : sl)
    if (s) prefix.push_back(static_cast<double>(s->up_first_passage));
  const double D = ks_statistic(cond, prefix);
  const double crit = ks_critical(cond.size(), prefix.size(), 0.01);

  // Acceptance rate times h against an independent estimate of c1.
  const MeanEstimate rate = binomial_estimate(N, attempts);
  const std::uint64_t ckey = derive_key(ctx.seed, 3);
  const auto hits = replicate<char>(ctx, N, [&](std::int64_t i) {
    return static_cast<char>(reaches_before_zero(law, derive_key(ckey, i), h, false));
  });
  const MeanEstimate p1 = binomial_estimate(std::count(hits.begin(), hits.end(), 1), N);
  const double se = h * combined_se(rate.se, p1.se);
  const bool rate_ok = within(h * rate.mean, h * p1.mean, se);
  const double excl_rate = static_cast<double>(count_missing(sl)) / N;

  for (double q : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    auto quant = [&](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return v.empty() ? 0.0 : v[static_cast<std::size_t>(q * (v.size() - 1))];
    };
    r.rows.push_back(json{{"quantile", q}, {"conditioned", quant(cond)}, {"up_prefix", quant(prefix)}});
  }
  r.summary = json{{"ks", D},
                   {"ks_critical_1pct", crit},
                   {"acceptance_rate_times_h", h * rate.mean},
                   {"c1_hat", h * p1.mean},
                   {"combined_stderr", se},
                   {"rate_consistent", rate_ok},
                   {"attempts", attempts},
                   {"exclusion_rate", excl_rate}};
  r.pass = D < crit && rate_ok && excl_rate < kMaxExclusionRate;
  return r;
}

namespace {

json event_params_json(const EventParams& p) {
  return json{{"C1", p.C1}, {"C2", p.C2}, {"delta1", p.delta1}, {"enforce_ranges", p.enforce_ranges}};
}

Site parity_adjusted(Site z, std::int64_t n) {
  const Site even = 2 * static_cast<Site>(std::floor(static_cast<double>(z) / 2.0));
  return even + (n % 2 != 0 ? 1 : 0);
}

Site half_width_n(const EnvLaw& law, std::int64_t n) { return half_width(law, std::log(static_cast<double>(n))); }

}  // namespace

SuiteResult event_frequencies(const EnvLaw& law, std::int64_t n, std::int64_t N, Site z, const EventParams& params,
                              const RunContext& ctx) {
  validate(params);
  SuiteResult r;
  r.name = "events";
  r.seed = ctx.seed;
  r.params = base_params(law);
  r.params["n"] = n;
  r.params["N"] = N;
  r.params["z"] = z;
  r.params["events"] = event_params_json(params);

  const Site half = half_width_n(law, n);
  const std::uint64_t key = derive_key(ctx.seed, 0);
  const auto prof = replicate<std::optional<EventProfile>>(ctx, N, [&](std::int64_t i) {
    return excluded_on_budget([&] { return classify_events(env_for(law, derive_key(key, i), half), n, z, params); });
  });
  const std::int64_t excluded = count_missing(prof);
  std::map<std::string, std::int64_t> c;
  for (const auto& p : prof) {
    if (!p) continue;
    c["E_minus"] += p->e_minus;
    c["E_plus"] += p->e_plus;
    c["E3"] += p->e3;
    c["E4"] += p->e4;
    c["E5"] += p->e5;
    c["E6"] += p->e6;
    c["E7"] += p->e7;
    c["E_C"] += p->e_c;
    c["degenerate_h_tilde"] += p->degenerate_h_tilde;
  }
  for (const char* k : {"E_minus", "E_plus", "E3", "E4", "E5", "E6", "E7", "E_C", "degenerate_h_tilde"}) {
    const MeanEstimate m = binomial_estimate(c[k], N - excluded);
    r.rows.push_back(json{{"event", k}, {"count", c[k]}, {"frequency", m.mean}, {"stderr", m.se}});
  }
  const double log_n = std::log(static_cast<double>(n));
  const double ll = std::log(log_n);
  const double excl_rate = static_cast<double>(excluded) / N;
  r.summary = json{{"h_n", log_n - params.C1 * ll},
                   {"h_tilde", log_n - 2 * params.C1 * ll},
                   {"gamma_n", static_cast<std::int64_t>(std::floor(std::pow(log_n, 4.0 / 3.0 + params.delta1)))},
                   {"excluded", excluded},
                   {"exclusion_rate", excl_rate}};
  r.pass = excl_rate < kMaxExclusionRate;
  return r;
}

namespace {

struct CouplingRow {
  std::int64_t env = 0;
  bool accepted = false;
  bool excluded = false;
  double p = 0.0, nu = 0.0, bracket = 0.0;
  std::int64_t meet = -1, exit = -1;
};

}  // namespace

SuiteResult coupling_experiment(const EnvLaw& law, std::int64_t n, std::int64_t N, Site z, const EventParams& params,
                                EnvFilter filter, std::int64_t max_envs, const RunContext& ctx) {
  validate(params);
  if (n < 16 || N < 1) throw Error(ErrorCode::RangeError, "coupling_experiment needs n >= 16 and N >= 1");
  SuiteResult r;
  r.name = "coupling";
  r.seed = ctx.seed;
  r.params = base_params(law);
  r.params["n"] = n;
  r.params["N"] = N;
  r.params["z"] = z;
  r.params["filter"] = filter == EnvFilter::EC ? "E_C" : "none";
  r.params["max_envs"] = max_envs;
  r.params["events"] = event_params_json(params);

  const double log_n = std::log(static_cast<double>(n));
  const double bound = 5 * std::pow(log_n, -3);
  const Site z0 = parity_adjusted(z, n);
  const Site half = half_width_n(law, n);
  const std::uint64_t key = derive_key(ctx.seed, 0);

  auto one = [&](std::int64_t i) {
    CouplingRow row;
    row.env = i;
    const std::uint64_t env_seed = derive_key(key, i);
    try {
      const auto w = env_for(law, env_seed, half);
      if (filter == EnvFilter::EC && !classify_events(w, n, z0, params).e_c) return row;
      row.accepted = true;
      const auto valley = central_valley(w, n, ctx.site_budget);
      const auto dp = quenched_dp(*valley.window, 0, n, Boundary::absorbing(valley.x_minus3, valley.x_plus3));
      row.p = dp.at(z0);
      row.bracket = dp.truncation_loss;
      row.nu = reflected_invariant(*valley.window, parity_of(n), valley.m_minus, valley.m_plus).at(z0);
      const auto c = simulate_coupling(valley, derive_key(env_seed, 7), false, ctx.site_budget);
      row.meet = c.tau_meet.value_or(-1);
      row.exit = c.tau_exit.value_or(-1);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ExtensionBudgetExceeded) throw;
      row.accepted = false;
      row.excluded = true;
    }
    return row;
  };

  // Batches of indices so that the accepted set is a prefix of the index order
  // whatever the thread count.
  std::vector<CouplingRow> taken;
  std::int64_t looked = 0, excluded = 0, skipped = 0;
  while (static_cast<std::int64_t>(taken.size()) < N && looked < max_envs) {
    const std::int64_t need = N - static_cast<std::int64_t>(taken.size());
    const std::int64_t batch = std::min(max_envs - looked, std::max<std::int64_t>(need, 8 * resolve_threads(ctx.threads)));
    const std::int64_t base = looked;
    const auto rows = replicate<CouplingRow>(ctx, batch, [&](std::int64_t j) { return one(base + j); });
    for (const auto& row : rows) {
      if (static_cast<std::int64_t>(taken.size()) >= N) break;
      ++looked;
      if (row.excluded) ++excluded;
      else if (!row.accepted) ++skipped;
      else taken.push_back(row);
    }
  }

  std::int64_t ok = 0, late_meet = 0, early_exit = 0;
  for (const auto& t : taken) {
    const double disc = std::fabs(t.p - t.nu) + t.bracket;
    const bool good = disc <= bound;
    ok += good;
    late_meet += (t.meet < 0 || t.meet > n / 10);
    early_exit += (t.exit >= 0 && t.exit <= n);
    r.rows.push_back(json{{"env", t.env},
                          {"p_quenched", t.p},
                          {"nu_hat", t.nu},
                          {"absorbed", t.bracket},
                          {"discrepancy", disc},
                          {"ok", good},
                          {"tau_meet", t.meet},
                          {"tau_exit", t.exit}});
  }
  const std::int64_t acc = static_cast<std::int64_t>(taken.size());
  const MeanEstimate f_ok = binomial_estimate(ok, acc);
  const MeanEstimate f_meet = binomial_estimate(late_meet, acc);
  const MeanEstimate f_exit = binomial_estimate(early_exit, acc);
  const double meet_bound = 2 * std::pow(log_n, -3), exit_bound = std::pow(log_n, -3);
  const bool meet_ok = acc > 0 && f_meet.mean <= meet_bound + 3 * f_meet.se;
  const bool exit_ok = acc > 0 && f_exit.mean <= exit_bound + 3 * f_exit.se;
  const bool frac_ok = acc >= N && f_ok.mean >= 0.9;
  const double excl_rate = looked ? static_cast<double>(excluded) / looked : 0.0;
  r.summary = json{{"accepted", acc},
                   {"looked_at", looked},
                   {"skipped_by_filter", skipped},
                   {"excluded", excluded},
                   {"bound", bound},
                   {"fraction_within_bound", mean_json(f_ok)},
                   {"fraction_late_meet", mean_json(f_meet)},
                   {"late_meet_bound", meet_bound},
                   {"fraction_exit_by_n", mean_json(f_exit)},
                   {"exit_bound", exit_bound},
                   {"meet_ok", meet_ok},
                   {"exit_ok", exit_ok},
                   {"exclusion_rate", excl_rate}};
  r.pass = frac_ok && meet_ok && exit_ok && excl_rate < kMaxExclusionRate;
  return r;
}

LltMethod llt_method_from_string(const std::string& s) {
  if (s == "direct") return LltMethod::Direct;
  if (s == "proxy") return LltMethod::Proxy;
  if (s == "dp") return LltMethod::Dp;
  throw Error(ErrorCode::ConfigError, "unknown method '" + s + "' (direct, proxy, dp)");
}

EnvFilter env_filter_from_string(const std::string& s) {
  if (s == "E_C" || s == "ec") return EnvFilter::EC;
  if (s == "none") return EnvFilter::None;
  throw Error(ErrorCode::ConfigError, "unknown filter '" + s + "' (E_C, none)");
}

namespace {

const char* method_name(LltMethod m) {
  switch (m) {
    case LltMethod::Direct: return "direct";
    case LltMethod::Proxy: return "proxy";
    case LltMethod::Dp: return "dp";
  }
  return "?";
}

// Per-environment values at each z of the grid (0 off the parity class).
std::vector<double> llt_values(const EnvLaw& law, std::int64_t n, const std::vector<Site>& z_grid, LltMethod method,
                               EnvFilter filter, const EventParams& params, std::uint64_t env_seed,
                               const RunContext& ctx) {
  std::vector<double> out(z_grid.size(), 0.0);
  switch (method) {
    case LltMethod::Direct: {
      const auto w = env_for(law, env_seed, 64);
      const Site end = simulate_walk(w, 0, n, derive_key(env_seed, 1), {}, ctx.site_budget).endpoint;
      for (std::size_t j = 0; j < z_grid.size(); ++j) out[j] = z_grid[j] == end ? 1.0 : 0.0;
      break;
    }
    case LltMethod::Dp: {
      const auto w = env_for(law, env_seed, 64);
      const auto dp = quenched_dp(w, 0, n, Boundary::full(), ctx.site_budget);
      for (std::size_t j = 0; j < z_grid.size(); ++j) out[j] = dp.at(z_grid[j]);
      break;
    }
    case LltMethod::Proxy: {
      const auto w = env_for(law, env_seed, half_width_n(law, n));
      const auto valley = central_valley(w, n, ctx.site_budget);
      const auto nu = reflected_invariant(*valley.window, parity_of(n), valley.m_minus, valley.m_plus);
      for (std::size_t j = 0; j < z_grid.size(); ++j) {
        if (filter == EnvFilter::EC && !classify_events(*valley.window, n, z_grid[j], params).e_c) continue;
        out[j] = nu.at(z_grid[j]);
      }
      break;
    }
  }
  return out;
}

struct LltTable {
  std::vector<MeanEstimate> est;
  std::int64_t excluded = 0;
};

LltTable llt_table(const EnvLaw& law, std::int64_t n, const std::vector<Site>& z_grid, std::int64_t N,
                   LltMethod method, EnvFilter filter, const EventParams& params, std::uint64_t key,
                   const RunContext& ctx) {
  const auto vals = replicate<std::optional<std::vector<double>>>(ctx, N, [&](std::int64_t i) {
    return excluded_on_budget(
        [&] { return llt_values(law, n, z_grid, method, filter, params, derive_key(key, i), ctx); });
  });
  LltTable t;
  t.excluded = count_missing(vals);
  for (std::size_t j = 0; j < z_grid.size(); ++j) {
    std::vector<double> col;
    col.reserve(vals.size());
    for (const auto& v : vals)
      if (v) col.push_back((*v)[j]);
    t.est.push_back(method == LltMethod::Direct
                        ? binomial_estimate(std::count(col.begin(), col.end(), 1.0), static_cast<std::int64_t>(col.size()))
                        : mean_estimate(col));
  }
  return t;
}

}  // namespace

SuiteResult verify_sinai_llt(const EnvLaw& law, std::int64_t n, const std::vector<Site>& z_grid, std::int64_t N,
                             LltMethod method, EnvFilter filter, const EventParams& params, const RunContext& ctx) {
  validate(params);
  if (n < 16 || N < 2) throw Error(ErrorCode::RangeError, "verify_sinai_llt needs n >= 16 and N >= 2");
  SuiteResult r;
  r.name = "sinai-llt";
  r.seed = ctx.seed;
  r.params = base_params(law);
  r.params["n"] = n;
  r.params["N"] = N;
  r.params["z_grid"] = z_grid;
  r.params["method"] = method_name(method);
  r.params["filter"] = filter == EnvFilter::EC ? "E_C" : "none";
  r.params["events"] = event_params_json(params);

  const auto t = llt_table(law, n, z_grid, N, method, filter, params, derive_key(ctx.seed, 0), ctx);
  const double log_n = std::log(static_cast<double>(n));
  const double scale = log_n * log_n / (2 * law.sigma * law.sigma);
  for (std::size_t j = 0; j < z_grid.size(); ++j) {
    const double pred = has_parity(z_grid[j], parity_of(n))
                            ? llt_prediction(LltMode::Walk, static_cast<double>(z_grid[j]), law.sigma,
                                             static_cast<double>(n))
                            : 0.0;
    r.rows.push_back(json{{"z", z_grid[j]},
                          {"estimate", t.est[j].mean},
                          {"stderr", t.est[j].se},
                          {"prediction", pred},
                          {"scaled_estimate", scale * t.est[j].mean},
                          {"scaled_error", scale * (t.est[j].mean - pred)}});
  }
  const double excl_rate = static_cast<double>(t.excluded) / N;
  r.summary = json{{"excluded", t.excluded}, {"exclusion_rate", excl_rate}, {"scale", scale}};
  r.pass = excl_rate < kMaxExclusionRate;
  return r;
}

SuiteResult compare_llt_methods(const EnvLaw& law, std::int64_t n, const std::vector<Site>& z_grid, std::int64_t N,
                                const RunContext& ctx) {
  SuiteResult r;
  r.name = "sinai-llt-dp-vs-direct";
  r.seed = ctx.seed;
  r.params = base_params(law);
  r.params["n"] = n;
  r.params["N"] = N;
  r.params["z_grid"] = z_grid;
  // Same environment keys for both; the walk draws its own stream.
  const std::uint64_t key = derive_key(ctx.seed, 0);
  const EventParams none;
  const auto dp = llt_table(law, n, z_grid, N, LltMethod::Dp, EnvFilter::None, none, key, ctx);
  const auto direct = llt_table(law, n, z_grid, N, LltMethod::Direct, EnvFilter::None, none, key, ctx);
  bool all_ok = true;
  for (std::size_t j = 0; j < z_grid.size(); ++j) {
    const double se = combined_se(dp.est[j].se, direct.est[j].se);
    const bool ok = within(dp.est[j].mean, direct.est[j].mean, se);
    all_ok = all_ok && ok;
    r.rows.push_back(json{{"z", z_grid[j]},
                          {"dp", dp.est[j].mean},
                          {"dp_stderr", dp.est[j].se},
                          {"direct", direct.est[j].mean},
                          {"direct_stderr", direct.est[j].se},
                          {"combined_stderr", se},
                          {"ok", ok}});
  }
  const double excl_rate = static_cast<double>(dp.excluded + direct.excluded) / (2.0 * N);
  r.summary = json{{"excluded_dp", dp.excluded}, {"excluded_direct", direct.excluded}, {"exclusion_rate", excl_rate}};
  r.pass = all_ok && excl_rate < kMaxExclusionRate;
  return r;
}

}  // namespace sinai
