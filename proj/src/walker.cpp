#include "sinai/walker.hpp"

#include <algorithm>
#include <cmath>

#include "sinai/decomp.hpp"
#include "sinai/error.hpp"
#include "sinai/quenched.hpp"
#include "sinai/rng.hpp"

namespace sinai {

namespace {

// Omega lookups with on-demand growth; copies the window only when it must grow.
class Track {
 public:
  Track(const PotentialWindow& w, Site budget) : base_(&w), budget_(budget) { bind(); }

  double omega(Site x) {
    if (x < lo_ || x > hi_) grow(x);
    return om_[x - lo_];
  }

 private:
  void bind() {
    const PotentialWindow& w = owned_ ? *owned_ : *base_;
    lo_ = w.lo();
    hi_ = w.hi();
    om_ = w.omega_values().data();
  }
  void grow(Site x) {
    const PotentialWindow& w = owned_ ? *owned_ : *base_;
    if (!w.extensible()) throw Error(ErrorCode::RangeError, "walk left the injected window at " + std::to_string(x));
    const Site width = std::max<Site>(64, w.size());
    Site lo = w.lo(), hi = w.hi();
    if (x < lo) lo = std::max(std::min(x, lo - width), -budget_);
    if (x > hi) hi = std::min(std::max(x, hi + width), budget_);
    if (x < lo || x > hi) throw Error(ErrorCode::ExtensionBudgetExceeded, "walk exceeded the site budget");
    owned_ = w.extended(lo, hi, budget_);
    bind();
  }

  const PotentialWindow* base_;
  std::optional<PotentialWindow> owned_;
  Site budget_;
  Site lo_ = 0, hi_ = -1;
  const double* om_ = nullptr;
};

}  // namespace

WalkResult simulate_walk(const PotentialWindow& w, Site start, std::int64_t n, std::uint64_t seed,
                         std::span<const Site> targets, Site site_budget) {
  if (n < 0) throw Error(ErrorCode::RangeError, "n must be >= 0");
  Track tr(w, site_budget);
  CounterRng rng(seed);
  WalkResult out;
  out.first_hits.assign(targets.size(), std::nullopt);
  auto record = [&](Site x, std::int64_t t) {
    for (std::size_t i = 0; i < targets.size(); ++i)
      if (!out.first_hits[i] && targets[i] == x) out.first_hits[i] = t;
  };
  Site x = start;
  record(x, 0);
  for (std::int64_t t = 1; t <= n; ++t) {
    x += rng.uniform() < tr.omega(x) ? 1 : -1;
    if (!targets.empty()) record(x, t);
  }
  out.endpoint = x;
  return out;
}

HitResult hitting_time(const PotentialWindow& w, Site start, Site target, std::int64_t cap, std::uint64_t seed,
                       HitVariant variant, Site site_budget) {
  if (variant == HitVariant::Hit && start == target) return {0, false};
  Track tr(w, site_budget);
  CounterRng rng(seed);
  Site x = start;
  for (std::int64_t t = 1; t <= cap; ++t) {
    x += rng.uniform() < tr.omega(x) ? 1 : -1;
    if (x == target) return {t, false};
  }
  return {cap, true};
}

HitResult exit_time(const PotentialWindow& w, Site start, Site a, Site c, std::int64_t cap, std::uint64_t seed) {
  if (start <= a || start >= c) return {0, false};
  Track tr(w, kDefaultSiteBudget);
  CounterRng rng(seed);
  Site x = start;
  for (std::int64_t t = 1; t <= cap; ++t) {
    x += rng.uniform() < tr.omega(x) ? 1 : -1;
    if (x == a || x == c) return {t, false};
  }
  return {cap, true};
}

CentralValley central_valley(const PotentialWindow& w, std::int64_t n, Site site_budget) {
  if (n < 3) throw Error(ErrorCode::RangeError, "central valley needs n >= 3");
  CentralValley v;
  v.n = n;
  v.h = std::log(static_cast<double>(n));
  const Decomposition d = scan_left_extrema(w, v.h, -3, 3, {.site_budget = site_budget, .flank = 0});
  v.b = localization_b_h(d);
  // Floor division; b_hat keeps the parity of n.
  const Site half = (v.b >= 0) ? v.b / 2 : -((-v.b + 1) / 2);
  v.b_hat = 2 * half + (n % 2 != 0 ? 1 : 0);
  if (v.b <= 0) {
    v.m_minus = d.position(-1);
    v.m_plus = d.position(1);
  } else {
    v.m_minus = d.position(0);
    v.m_plus = d.position(2);
  }
  v.x_minus3 = d.position(-3);
  v.x_plus3 = d.position(3);
  v.window = d.window_ptr();
  return v;
}

CouplingRecord simulate_coupling(const CentralValley& valley, std::uint64_t seed, bool keep_paths,
                                 Site site_budget) {
  const PotentialWindow& w = *valley.window;
  const Site mm = valley.m_minus, mp = valley.m_plus;
  const ProbVector nu = reflected_invariant(w, parity_of(valley.n), mm, mp);
  CouplingRecord rec;
  rec.horizon = valley.n;
  {
    CounterRng pick(derive_key(seed, 3));
    const double u = pick.uniform();
    double acc = 0.0;
    Site y = mm;
    for (Site x = mm; x <= mp; ++x) {
      const double p = nu.at(x);
      if (p == 0.0) continue;
      y = x;  // last site with mass guards against rounding in the tail
      acc += p;
      if (u < acc) break;
    }
    rec.shat_start = y;
  }
  Track tr(w, site_budget);
  CounterRng rs(derive_key(seed, 1)), rh(derive_key(seed, 2));
  Site s = valley.b_hat, sh = rec.shat_start;
  auto reflected_step = [&](Site x, double u) {
    if (x == mm) return x + 1;
    if (x == mp) return x - 1;
    return u < tr.omega(x) ? x + 1 : x - 1;
  };
  bool locked = false;
  if (s == sh) {
    rec.tau_meet = 0;
    locked = true;
  }
  if (keep_paths) {
    rec.s_path.push_back(s);
    rec.shat_path.push_back(sh);
  }
  for (std::int64_t t = 1; t <= valley.n; ++t) {
    const double us = rs.uniform();
    const double uh = rh.uniform();
    const Site prev = s;
    s += us < tr.omega(s) ? 1 : -1;
    if (locked) {
      if (s < mm || s > mp) {
        locked = false;
        rec.tau_exit = t;
        sh = reflected_step(prev, uh);
      } else {
        sh = s;
      }
    } else {
      sh = reflected_step(sh, uh);
      if (!rec.tau_meet && s == sh) {
        rec.tau_meet = t;
        locked = true;
      }
    }
    if (keep_paths) {
      rec.s_path.push_back(s);
      rec.shat_path.push_back(sh);
    }
  }
  rec.s_endpoint = s;
  rec.shat_endpoint = sh;
  return rec;
}

CouplingRecord simulate_coupling(const PotentialWindow& w, std::int64_t n, std::uint64_t seed) {
  return simulate_coupling(central_valley(w, n), seed);
}

}  // namespace sinai
