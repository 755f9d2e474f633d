#include "sinai/decomp.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "sinai/error.hpp"

namespace sinai {

const char* to_string(ExtremumKind k) noexcept { return k == ExtremumKind::Min ? "min" : "max"; }
const char* to_string(Side s) noexcept { return s == Side::Left ? "left" : "right"; }

// ---- slopes -----------------------------------------------------------------

SlopeView::SlopeView(std::vector<double> levels, std::optional<double> h) : levels_(std::move(levels)) {
  if (levels_.size() < 2) throw Error(ErrorCode::RangeError, "a slope needs length >= 1");
  const auto [lo, hi] = std::minmax_element(levels_.begin(), levels_.end());
  const double first = levels_.front(), last = levels_.back();
  if (first == *lo && last == *hi && *hi > *lo) {
    direction_ = SlopeDirection::Upward;
  } else if (last == *lo && first == *hi && *hi > *lo) {
    direction_ = SlopeDirection::Downward;
  } else {
    throw Error(ErrorCode::RangeError, "path is not a slope");
  }
  height_ = *hi - *lo;
  if (h) excess_ = height_ - *h;
}

std::vector<double> SlopeView::values() const {
  std::vector<double> out(levels_.size());
  for (std::size_t i = 0; i < levels_.size(); ++i) out[i] = levels_[i] - levels_.front();
  return out;
}

Site SlopeView::first_passage(double h) const {
  const double base = levels_.front();
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const bool hit = direction_ == SlopeDirection::Upward ? rises_by(base, levels_[i], h) : rises_by(levels_[i], base, h);
    if (hit) return static_cast<Site>(i);
  }
  return -1;
}

SlopeView zeta(const SlopeView& slope) {
  // Reversing the raw levels: t'(i) = level(l - i) - level(l) = T(l - i) - T(l).
  std::vector<double> rev(slope.levels().rbegin(), slope.levels().rend());
  SlopeView out(std::move(rev));
  if (slope.excess()) out = SlopeView(std::vector<double>(out.levels().begin(), out.levels().end()),
                                      slope.height() - *slope.excess());
  return out;
}

Path glue(const Path& f, const Path& g) {
  if (f.empty()) return g;
  if (g.empty()) return f;
  Path out = f;
  out.reserve(f.size() + g.size() - 1);
  // f(b) + g(j) - g(c), grouped so that matching junctions copy g verbatim.
  const double shift = f.back() - g.front();
  for (std::size_t j = 1; j < g.size(); ++j) out.push_back(g[j] + shift);
  return out;
}

// ---- decomposition ----------------------------------------------------------

Decomposition::Decomposition(double h, Side side, std::vector<ExtremumRecord> extrema, std::int64_t k_min,
                             std::int64_t k_max, std::shared_ptr<const PotentialWindow> window)
    : h_(h), side_(side), extrema_(std::move(extrema)), k_min_(k_min), k_max_(k_max), window_(std::move(window)) {
  if (extrema_.empty()) throw Error(ErrorCode::RangeError, "empty decomposition");
}

const ExtremumRecord& Decomposition::x(std::int64_t k) const {
  if (k < first_index() || k > last_index())
    throw Error(ErrorCode::RangeError, "extremum index " + std::to_string(k) + " not certified");
  return extrema_[static_cast<std::size_t>(k - first_index())];
}

SlopeView Decomposition::slope(std::int64_t i) const {
  const Site a = x(i).position, b = x(i + 1).position;
  const auto vs = window_->v_values();
  const auto off = window_->lo();
  return SlopeView(std::vector<double>(vs.begin() + (a - off), vs.begin() + (b - off) + 1), h_);
}

// ---- tau / m recursion ------------------------------------------------------

ExtremaRecursion::ExtremaRecursion(double h, Site start, double v_start)
    : h_(h), ext_(v_start), first_(start), last_(start) {}

bool ExtremaRecursion::feed(Site x, double v) {
  if (rising_) {
    if (v < ext_) {
      ext_ = v;
      first_ = last_ = x;
    } else if (v == ext_) {
      last_ = x;
    }
    if (!rises_by(ext_, v, h_)) return false;
  } else {
    if (v > ext_) {
      ext_ = v;
      first_ = last_ = x;
    } else if (v == ext_) {
      last_ = x;
    }
    if (!rises_by(v, ext_, h_)) return false;
  }
  stages_.push_back(Stage{x, first_, last_, ext_});
  rising_ = !rising_;
  ext_ = v;
  first_ = last_ = x;
  return true;
}

namespace {

void check_h(double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::RangeError, "h must be > 0");
}

// Window that grows on demand along a ray from 0 (dir = +1 or -1).
class RayCursor {
 public:
  RayCursor(const PotentialWindow& w, int dir, Site budget) : w_(w), dir_(dir), budget_(budget) {}

  double at(Site t) {
    const Site x = dir_ * t;
    if (!w_.contains(x)) grow(x);
    return w_.v(x);
  }

 private:
  void grow(Site x) {
    if (!w_.extensible())
      throw Error(ErrorCode::ExtensionBudgetExceeded, "injected window too short (needs site " + std::to_string(x) + ")");
    const Site width = std::max<Site>(64, w_.size());
    Site lo = w_.lo(), hi = w_.hi();
    if (x > hi) hi = std::min(std::max(x, hi + width), budget_);
    if (x < lo) lo = std::max(std::min(x, lo - width), -budget_);
    if (x > hi || x < lo)
      throw Error(ErrorCode::ExtensionBudgetExceeded, "site " + std::to_string(x) + " beyond the site budget");
    w_ = w_.extended(lo, hi, budget_);
  }

  PotentialWindow w_;
  int dir_;
  Site budget_;
};

PotentialWindow widen(const PotentialWindow& w, bool left, bool right, Site budget) {
  if (!w.extensible())
    throw Error(ErrorCode::ExtensionBudgetExceeded, "injected window too short to certify the requested extrema");
  const Site width = std::max<Site>(64, w.size());
  Site lo = w.lo(), hi = w.hi();
  if (left) {
    if (lo <= -budget) throw Error(ErrorCode::ExtensionBudgetExceeded, "left site budget exhausted");
    lo = std::max(lo - width, -budget);
  }
  if (right) {
    if (hi >= budget) throw Error(ErrorCode::ExtensionBudgetExceeded, "right site budget exhausted");
    hi = std::min(hi + width, budget);
  }
  return w.extended(lo, hi, budget);
}

struct Located {
  std::vector<ExtremumRecord> records;
  bool need_left = false;
  bool need_right = false;
};

// Finds x_{lo_idx}..x_{hi_idx} (normalized x_0 <= 0 < x_1) in a fixed window.
Located locate(const PotentialWindow& view, double h, std::int64_t lo_idx, std::int64_t hi_idx) {
  Located out;
  const ScanCoverage cov = scan_window_left_extrema(view, h);
  const auto& L = cov.extrema;
  const auto n = static_cast<std::int64_t>(L.size());
  std::int64_t j = -1;
  for (std::int64_t i = 0; i < n && L[i].position <= 0; ++i) j = i;
  if (!cov.complete || cov.coverage_begin > 0 || j < 0) out.need_left = true;
  // x_0 is pinned once the list is known to be complete past 0: either x_1
  // is certified or the last completed stopping time lies right of 0 (the
  // next extremum m_{K+1} is at or after it).
  if (j + 1 >= n && cov.coverage_end <= 0) out.need_right = true;
  if (out.need_left || out.need_right) return out;
  if (j + lo_idx < 0) out.need_left = true;
  if (j + hi_idx >= n) out.need_right = true;
  if (out.need_left || out.need_right) return out;
  for (std::int64_t i = j + lo_idx; i <= j + hi_idx; ++i) {
    ExtremumRecord r = L[static_cast<std::size_t>(i)];
    r.index = i - j;
    out.records.push_back(r);
  }
  return out;
}

Decomposition scan_impl(const PotentialWindow& window, double h, std::int64_t k_min, std::int64_t k_max,
                        const ScanOptions& opts, bool reflect) {
  check_h(h);
  if (k_min > k_max) throw Error(ErrorCode::RangeError, "k_min > k_max");
  const std::int64_t f = std::max(0, opts.flank);
  const std::int64_t need_lo = reflect ? 1 - k_max - f : k_min - f;
  const std::int64_t need_hi = reflect ? 1 - k_min + f : k_max + f;
  PotentialWindow w = window;
  for (;;) {
    Located loc = reflect ? locate(w.reflected(), h, need_lo, need_hi) : locate(w, h, need_lo, need_hi);
    if (!loc.need_left && !loc.need_right) {
      auto shared = std::make_shared<const PotentialWindow>(std::move(w));
      if (!reflect)
        return Decomposition(h, Side::Left, std::move(loc.records), k_min, k_max, std::move(shared));
      std::vector<ExtremumRecord> recs;
      recs.reserve(loc.records.size());
      for (auto it = loc.records.rbegin(); it != loc.records.rend(); ++it)
        recs.push_back(ExtremumRecord{-it->position, it->kind, it->value, 1 - it->index});
      return Decomposition(h, Side::Right, std::move(recs), k_min, k_max, std::move(shared));
    }
    const bool grow_lo = reflect ? loc.need_right : loc.need_left;
    const bool grow_hi = reflect ? loc.need_left : loc.need_right;
    w = widen(w, grow_lo, grow_hi, opts.site_budget);
  }
}

void normalize_indices(std::vector<ExtremumRecord>& recs, bool strict_zero) {
  std::int64_t j = -1;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const Site p = recs[i].position;
    if (strict_zero ? p < 0 : p <= 0) j = static_cast<std::int64_t>(i);
  }
  // Nothing at or left of 0: the first record is x_1 (resp. x_1^*).
  const std::int64_t base = j >= 0 ? j : -1;
  for (std::size_t i = 0; i < recs.size(); ++i) recs[i].index = static_cast<std::int64_t>(i) - base;
}

// Brute-force test for one site. For a minimum, `left_ok(u)` says u may be
// crossed on the way to alpha, `right_ok(u)` likewise towards beta.
template <class LeftOk, class RightOk, class Rise>
bool has_witnesses(std::span<const double> v, std::size_t y, LeftOk left_ok, RightOk right_ok, Rise rise) {
  bool alpha = false;
  for (std::size_t j = y; j-- > 0;) {
    if (!left_ok(v[j])) break;
    if (rise(v[j])) {
      alpha = true;
      break;
    }
  }
  if (!alpha) return false;
  for (std::size_t j = y + 1; j < v.size(); ++j) {
    if (!right_ok(v[j])) break;
    if (rise(v[j])) return true;
  }
  return false;
}

std::vector<ExtremumRecord> bruteforce(const PotentialWindow& window, double h, bool left_side) {
  check_h(h);
  const auto v = window.v_values();
  std::vector<ExtremumRecord> out;
  for (std::size_t y = 0; y < v.size(); ++y) {
    const double c = v[y];
    auto up = [&](double u) { return rises_by(c, u, h); };
    auto down = [&](double u) { return rises_by(u, c, h); };
    auto gt = [&](double u) { return u > c; };
    auto ge = [&](double u) { return u >= c; };
    auto lt = [&](double u) { return u < c; };
    auto le = [&](double u) { return u <= c; };
    bool is_min, is_max;
    if (left_side) {
      is_min = has_witnesses(v, y, gt, ge, up);
      is_max = has_witnesses(v, y, lt, le, down);
    } else {
      is_min = has_witnesses(v, y, ge, gt, up);
      is_max = has_witnesses(v, y, le, lt, down);
    }
    const Site x = window.lo() + static_cast<Site>(y);
    if (is_min) out.push_back({x, ExtremumKind::Min, c, 0});
    if (is_max) out.push_back({x, ExtremumKind::Max, c, 0});
  }
  normalize_indices(out, !left_side);
  return out;
}

}  // namespace

ScanCoverage scan_window_left_extrema(const PotentialWindow& window, double h) {
  check_h(h);
  ScanCoverage cov;
  const auto v = window.v_values();
  const Site lo = window.lo();
  ExtremaRecursion rec(h, lo, v[0]);
  for (std::size_t i = 1; i < v.size(); ++i) rec.feed(lo + static_cast<Site>(i), v[i]);
  const auto& st = rec.stages();
  cov.complete = !st.empty();
  if (!cov.complete) {
    cov.coverage_begin = window.hi() + 1;
    cov.coverage_end = window.hi();
    return cov;
  }
  cov.coverage_end = st.back().tau;
  // m_k for k >= 2 is certified by the witnesses m_{k-1} and tau_k. m_1 is
  // only a running minimum unless the window already shows an h-rise to its
  // left (everything left of a first argmin is strictly higher). Either way
  // nothing else is a left extremum from m_1 (resp. tau_1) on.
  const Site m1 = st[0].m;
  double left_max = -std::numeric_limits<double>::infinity();
  for (Site x = lo; x < m1; ++x) left_max = std::max(left_max, v[static_cast<std::size_t>(x - lo)]);
  const bool m1_certified = m1 > lo && rises_by(st[0].m_value, left_max, h);
  cov.coverage_begin = m1_certified ? m1 : st[0].tau;
  for (std::size_t k = m1_certified ? 0 : 1; k < st.size(); ++k) {
    const ExtremumKind kind = (k % 2 == 0) ? ExtremumKind::Min : ExtremumKind::Max;
    cov.extrema.push_back({st[k].m, kind, st[k].m_value, static_cast<std::int64_t>(cov.extrema.size())});
  }
  return cov;
}

Decomposition scan_left_extrema(const PotentialWindow& window, double h, std::int64_t k_min, std::int64_t k_max,
                                const ScanOptions& opts) {
  return scan_impl(window, h, k_min, k_max, opts, false);
}

Decomposition right_extrema(const PotentialWindow& window, double h, std::int64_t k_min, std::int64_t k_max,
                            const ScanOptions& opts) {
  return scan_impl(window, h, k_min, k_max, opts, true);
}

std::vector<ExtremumRecord> bruteforce_left_extrema(const PotentialWindow& window, double h) {
  return bruteforce(window, h, true);
}

std::vector<ExtremumRecord> bruteforce_right_extrema(const PotentialWindow& window, double h) {
  return bruteforce(window, h, false);
}

Site localization_b_h(const Decomposition& left) {
  if (left.side() != Side::Left) throw Error(ErrorCode::RangeError, "b_h needs a left decomposition");
  const ExtremumRecord& x0 = left.x(0);
  return x0.kind == ExtremumKind::Min ? x0.position : left.x(1).position;
}

Site compute_b_h(const PotentialWindow& window, double h, const ScanOptions& opts) {
  ScanOptions o = opts;
  o.flank = 0;
  // x_1 is only needed when x_0 turns out to be a maximum.
  const Decomposition d0 = scan_left_extrema(window, h, 0, 0, o);
  if (d0.x(0).kind == ExtremumKind::Min) return d0.x(0).position;
  return scan_left_extrema(d0.window(), h, 1, 1, o).x(1).position;
}

namespace {

struct RayStage {
  Site d = 0;
  Site first_argmin = 0, last_argmin = 0;
  double max = 0.0;
};

// First stage of the recursion on t -> V(dir * t), t >= 0: d_Z(h) and the
// arg-minima of Z on [0, d].
RayStage first_rise(const PotentialWindow& window, double h, int dir, Site budget) {
  RayCursor cur(window, dir, budget);
  double v0 = cur.at(0);
  ExtremaRecursion rec(h, 0, v0);
  double mx = v0;
  for (Site t = 1;; ++t) {
    const double v = cur.at(t);
    mx = std::max(mx, v);
    if (rec.feed(t, v)) {
      const auto& s = rec.stages().front();
      return RayStage{t, s.m, s.m_star, mx};
    }
  }
}

}  // namespace

KestenPoint kesten_b_h_K(const PotentialWindow& window, double h, const ScanOptions& opts) {
  check_h(h);
  const RayStage plus = first_rise(window, h, +1, opts.site_budget);
  const RayStage minus = first_rise(window, h, -1, opts.site_budget);
  KestenPoint k;
  k.d_plus = plus.d;
  k.d_minus = minus.d;
  k.b_plus = plus.first_argmin;
  k.b_minus = minus.last_argmin;
  k.max_plus = plus.max;
  k.max_minus = minus.max;
  k.b_K = plus.max < minus.max ? k.b_plus : -k.b_minus;
  return k;
}

CanonicalSlopes extract_canonical_slopes(const PotentialWindow& window, double h, SlopeVariant variant,
                                         const ScanOptions& opts) {
  check_h(h);
  RayCursor cur(window, +1, opts.site_budget);
  ExtremaRecursion rec(h, 0, cur.at(0));
  std::vector<double> levels{cur.at(0)};
  for (Site t = 1; rec.stages().size() < 3; ++t) {
    levels.push_back(cur.at(t));
    rec.feed(t, levels.back());
  }
  const auto& st = rec.stages();
  auto pick = [&](std::size_t k) { return variant == SlopeVariant::Plain ? st[k].m : st[k].m_star; };
  const Site m1 = pick(0), m2 = pick(1), m3 = pick(2);
  auto cut = [&](Site a, Site b) {
    return SlopeView(std::vector<double>(levels.begin() + a, levels.begin() + b + 1), h);
  };
  return CanonicalSlopes{cut(m1, m2), cut(m2, m3), m1, m2, m3, st[0].tau, st[1].tau, st[2].tau};
}

LadderEpochs ladder_epochs(const PotentialWindow& window, double h, const ScanOptions& opts) {
  check_h(h);
  RayCursor cur(window, +1, opts.site_budget);
  LadderEpochs out;
  out.epochs.push_back(0);
  double base = cur.at(0), top = base;
  // Stops as soon as excursion L reaches height h; its end e_{L+1} can lie
  // arbitrarily far out and is not needed for m_1^* = e_L.
  for (Site t = 1;; ++t) {
    const double v = cur.at(t);
    if (v <= base) {
      out.heights.push_back(top - base);
      out.epochs.push_back(t);
      base = top = v;
      continue;
    }
    top = std::max(top, v);
    if (rises_by(base, top, h)) break;
  }
  out.L = static_cast<std::int64_t>(out.epochs.size()) - 1;
  out.m1_star = out.epochs.back();
  return out;
}

}  // namespace sinai
