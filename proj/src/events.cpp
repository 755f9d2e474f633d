#include "sinai/events.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "sinai/decomp.hpp"
#include "sinai/error.hpp"

namespace sinai {

void validate(const EventParams& p) {
  if (!p.enforce_ranges) return;
  if (!(p.C1 > 20)) throw Error(ErrorCode::ConfigError, "C1 must exceed 20, got " + std::to_string(p.C1));
  if (!(p.C2 > 9)) throw Error(ErrorCode::ConfigError, "C2 must exceed 9, got " + std::to_string(p.C2));
  if (!(p.delta1 > 0 && p.delta1 < 2.0 / 3.0))
    throw Error(ErrorCode::ConfigError, "delta1 must lie in (0, 2/3), got " + std::to_string(p.delta1));
}

namespace {

// Left extrema x_kmin..x_kmax, or nothing when an injected window cannot
// certify them.
std::optional<Decomposition> try_scan(const PotentialWindow& w, double h, std::int64_t kmin, std::int64_t kmax) {
  try {
    return scan_left_extrema(w, h, kmin, kmax, ScanOptions{kDefaultSiteBudget, 0});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ExtensionBudgetExceeded && !w.extensible()) return std::nullopt;
    throw;
  }
}

// Window covering [lo, hi], or nothing if it cannot be had.
std::optional<PotentialWindow> covering(const PotentialWindow& w, Site lo, Site hi) {
  if (w.lo() <= lo && w.hi() >= hi) return w;
  if (!w.extensible()) return std::nullopt;
  return w.extended(std::min(lo, w.lo()), std::max(hi, w.hi()));
}

double max_on(const PotentialWindow& w, Site a, Site c) {
  double m = w.v(a);
  for (Site x = a + 1; x <= c; ++x) m = std::max(m, w.v(x));
  return m;
}

}  // namespace

EventProfile classify_events(const PotentialWindow& window, std::int64_t n, Site z, const EventParams& params) {
  validate(params);
  if (n < 16) throw Error(ErrorCode::RangeError, "classify_events needs n >= 16 so that loglog n > 0");
  EventProfile e;
  e.n = n;
  e.z = z;
  e.params = params;
  e.log_n = std::log(static_cast<double>(n));
  e.loglog_n = std::log(e.log_n);
  e.h_n = e.log_n - params.C1 * e.loglog_n;
  e.h_tilde = e.h_n - params.C1 * e.loglog_n;
  e.gamma_n = static_cast<std::int64_t>(std::floor(std::pow(e.log_n, 4.0 / 3.0 + params.delta1)));

  // E3: the 21 slopes T_{-10}..T_{10} at height h_tilde are all tall.
  if (e.h_tilde <= 0) {
    e.degenerate_h_tilde = true;
  } else if (auto d = try_scan(window, e.h_tilde, -10, 11)) {
    const double need = e.log_n + params.C2 * e.loglog_n;
    e.e3 = true;
    for (std::int64_t i = -10; i <= 10 && e.e3; ++i) e.e3 = d->slope(i).height() >= need;
  } else {
    e.uncertified = true;
  }

  auto d = try_scan(window, e.log_n, -12, 12);
  if (!d) {
    e.uncertified = true;
    return e;
  }
  e.b = localization_b_h(*d);
  e.e_plus = e.b > 0;
  e.e_minus = !e.e_plus;
  const Site x0 = d->position(0), x1 = d->position(1);

  // E5
  const double reach = std::pow(e.log_n, 2.0 + params.delta1);
  e.e5 = -reach <= static_cast<double>(d->position(-12)) && static_cast<double>(d->position(12)) <= reach;

  // E7
  e.e7 = std::llabs(e.b - z) <= e.gamma_n;

  auto w = covering(d->window(), std::min({e.b - e.gamma_n, z, Site{0}}), std::max({e.b + e.gamma_n, z, Site{0}}));
  if (!w) {
    e.uncertified = true;
    return e;
  }
  const double vb = w->v(e.b);

  // E6
  e.e6 = max_on(*w, e.b - e.gamma_n, e.b + e.gamma_n) - vb < e.log_n;

  // E4(z)
  const double ll = e.loglog_n;
  e.e4 = w->v(z) - vb >= 5 * ll;
  if (!e.e4 && e.e_minus) e.e4 = max_on(*w, e.b, 0) < w->v(x1) - 9 * ll;
  if (!e.e4 && e.e_plus) e.e4 = max_on(*w, 0, e.b) < w->v(x0) - 9 * ll;

  e.e_c = e.e3 && e.e4 && e.e5 && e.e6 && e.e7;
  return e;
}

}  // namespace sinai
