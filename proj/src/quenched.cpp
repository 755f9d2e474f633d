#include "sinai/quenched.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "sinai/error.hpp"

namespace sinai {

namespace {

void need(const PotentialWindow& w, Site x) {
  if (!w.contains(x))
    throw Error(ErrorCode::RangeError,
                "site " + std::to_string(x) + " outside [" + std::to_string(w.lo()) + ", " + std::to_string(w.hi()) + "]");
}

// sum_{j=from}^{to} e^{V(j) - shift}
double shifted_sum(const PotentialWindow& w, Site from, Site to, double shift) {
  double s = 0.0;
  for (Site j = from; j <= to; ++j) s += std::exp(w.v(j) - shift);
  return s;
}

void check_abc(const PotentialWindow& w, Site a, Site b, Site c) {
  if (!(a < b && b < c)) throw Error(ErrorCode::RangeError, "need a < b < c");
  need(w, a);
  need(w, c);
}

double max_v(const PotentialWindow& w, Site from, Site to) {
  double m = -std::numeric_limits<double>::infinity();
  for (Site j = from; j <= to; ++j) m = std::max(m, w.v(j));
  return m;
}

}  // namespace

double hit_prob(const PotentialWindow& w, Site a, Site b, Site c) {
  check_abc(w, a, b, c);
  const double m = max_v(w, a, c - 1);
  return shifted_sum(w, a, b - 1, m) / shifted_sum(w, a, c - 1, m);
}

double hit_prob_lower(const PotentialWindow& w, Site a, Site b, Site c) {
  check_abc(w, a, b, c);
  const double m = max_v(w, a, c - 1);
  return shifted_sum(w, b, c - 1, m) / shifted_sum(w, a, c - 1, m);
}

double Measure::value(Site x) const { return std::exp(log_value(x)); }

double Measure::log_value(Site x) const {
  if (!contains(x)) throw Error(ErrorCode::RangeError, "measure queried outside its range");
  return std::log(scaled[static_cast<std::size_t>(x - lo)]) + log_scale;
}

Measure reversible_measure(const PotentialWindow& w, Site lo, Site hi) {
  if (lo > hi) throw Error(ErrorCode::RangeError, "empty range");
  need(w, lo - 1);
  need(w, hi);
  double vmin = std::numeric_limits<double>::infinity();
  for (Site x = lo - 1; x <= hi; ++x) vmin = std::min(vmin, w.v(x));
  Measure m;
  m.lo = lo;
  m.log_scale = -vmin;
  m.scaled.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (Site x = lo; x <= hi; ++x) m.scaled.push_back(std::exp(vmin - w.v(x)) + std::exp(vmin - w.v(x - 1)));
  return m;
}

ProbVector reflected_invariant(const PotentialWindow& w, Parity parity, Site m_minus, Site m_plus) {
  if (!(m_minus < m_plus)) throw Error(ErrorCode::RangeError, "need M- < M+");
  need(w, m_minus);
  need(w, m_plus);
  double vmin = std::numeric_limits<double>::infinity();
  for (Site x = m_minus; x <= m_plus; ++x) vmin = std::min(vmin, w.v(x));
  auto e = [&](Site x) { return std::exp(vmin - w.v(x)); };
  double z = 0.0;
  for (Site i = m_minus; i < m_plus; ++i) z += e(i);
  ProbVector out;
  out.lo = m_minus;
  out.p.assign(static_cast<std::size_t>(m_plus - m_minus + 1), 0.0);
  for (Site x = m_minus; x <= m_plus; ++x) {
    if (!has_parity(x, parity)) continue;
    double mu;
    if (x == m_minus) mu = e(m_minus);
    else if (x == m_plus) mu = e(m_plus - 1);
    else mu = e(x) + e(x - 1);
    out.p[static_cast<std::size_t>(x - m_minus)] = mu / z;
  }
  return out;
}

ProbVector reflected_step(const PotentialWindow& w, const ProbVector& p, Site m_minus, Site m_plus) {
  ProbVector out;
  out.lo = m_minus;
  out.p.assign(static_cast<std::size_t>(m_plus - m_minus + 1), 0.0);
  for (Site x = m_minus; x <= m_plus; ++x) {
    const double mass = p.at(x);
    if (mass == 0.0) continue;
    const double right = x == m_minus ? 1.0 : x == m_plus ? 0.0 : w.omega(x);
    if (right > 0.0) out.p[static_cast<std::size_t>(x + 1 - m_minus)] += mass * right;
    if (right < 1.0) out.p[static_cast<std::size_t>(x - 1 - m_minus)] += mass * (1.0 - right);
  }
  return out;
}

double QuenchedDist::total() const noexcept {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

void QuenchedDist::write_csv(std::ostream& os) const {
  os.precision(17);
  os << "# n=" << n << " start=" << start << " truncation_loss=" << truncation_loss << '\n';
  os << "site,probability\n";
  for (Site z = lo; z <= hi(); ++z)
    if (at(z) != 0.0) os << z << ',' << at(z) << '\n';
}

QuenchedDist quenched_dp(const PotentialWindow& window, Site start, std::int64_t n, Boundary boundary,
                         Site site_budget) {
  if (n < 0) throw Error(ErrorCode::RangeError, "n must be >= 0");
  QuenchedDist out;
  out.n = n;
  out.start = start;
  Site lo, hi;
  const PotentialWindow* w = &window;
  PotentialWindow grown;
  if (boundary.kind == Boundary::Kind::Full) {
    lo = start - n;
    hi = start + n;
    if (!window.contains(lo) || !window.contains(hi)) {
      if (!window.extensible())
        throw Error(ErrorCode::RangeError, "injected window does not cover [start - n, start + n]");
      grown = window.extended(std::min(lo, window.lo()), std::max(hi, window.hi()), site_budget);
      w = &grown;
    }
  } else {
    lo = boundary.a;
    hi = boundary.c;
    if (!(lo < start && start < hi)) throw Error(ErrorCode::RangeError, "absorbing mode needs a < start < c");
    need(window, lo);
    need(window, hi);
  }
  const auto width = static_cast<std::size_t>(hi - lo + 1);
  // Padded by one on each side so the update below has no edge cases.
  std::vector<double> right(width + 2, 0.0), left(width + 2, 0.0), p(width + 2, 0.0), q(width + 2, 0.0);
  const bool absorbing = boundary.kind == Boundary::Kind::Absorbing;
  for (std::size_t i = 0; i < width; ++i) {
    const Site x = lo + static_cast<Site>(i);
    if (absorbing && (x == lo || x == hi)) continue;  // absorbing sites emit nothing
    right[i + 1] = w->omega(x);
    left[i + 1] = 1.0 - right[i + 1];
  }
  p[static_cast<std::size_t>(start - lo) + 1] = 1.0;
  const std::size_t ia = 1, ic = width;
  double loss = 0.0;
  for (std::int64_t t = 0; t < n; ++t) {
    const double* pp = p.data();
    const double* rr = right.data();
    const double* ll = left.data();
    double* qq = q.data();
    for (std::size_t i = 1; i <= width; ++i) qq[i] = pp[i - 1] * rr[i - 1] + pp[i + 1] * ll[i + 1];
    if (absorbing) {
      loss += q[ia] + q[ic];
      q[ia] = q[ic] = 0.0;
    }
    std::swap(p, q);
  }
  out.lo = lo;
  out.mass.assign(p.begin() + 1, p.begin() + 1 + static_cast<std::ptrdiff_t>(width));
  out.truncation_loss = loss;
  return out;
}

}  // namespace sinai
