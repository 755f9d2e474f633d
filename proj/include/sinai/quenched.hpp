#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sinai/env.hpp"

namespace sinai {

// P_omega^b[tau(c) < tau(a)], a < b < c inside the window.
double hit_prob(const PotentialWindow& w, Site a, Site b, Site c);
// P_omega^b[tau(a) < tau(c)]; computed from its own sum, not as 1 - hit_prob.
double hit_prob_lower(const PotentialWindow& w, Site a, Site b, Site c);

// Positive weights on [lo, lo + size), stored as value(x) = scaled[x] * e^{log_scale}
// so that potentials in the hundreds do not overflow.
struct Measure {
  Site lo = 0;
  std::vector<double> scaled;
  double log_scale = 0.0;

  Site hi() const noexcept { return lo + static_cast<Site>(scaled.size()) - 1; }
  bool contains(Site x) const noexcept { return x >= lo && x <= hi(); }
  double value(Site x) const;      // may overflow to inf for extreme potentials
  double log_value(Site x) const;
  double scaled_at(Site x) const { return contains(x) ? scaled[static_cast<std::size_t>(x - lo)] : 0.0; }
};

// mu(x) = e^{-V(x)} + e^{-V(x-1)} for x in [lo, hi]; needs lo - 1 in the window.
Measure reversible_measure(const PotentialWindow& w, Site lo, Site hi);

enum class Parity { Even, Odd };
inline Parity parity_of(std::int64_t n) noexcept { return (n % 2 == 0) ? Parity::Even : Parity::Odd; }
inline bool has_parity(Site x, Parity p) noexcept { return ((x % 2 + 2) % 2 == 0) == (p == Parity::Even); }

// nu-hat on [M-, M+]: the reflected walk's invariant weights restricted to the
// sites of the given parity, normalized by sum_{i=M-}^{M+-1} e^{-V(i)}.
// Returned as plain probabilities (zeros off the parity class).
struct ProbVector {
  Site lo = 0;
  std::vector<double> p;

  Site hi() const noexcept { return lo + static_cast<Site>(p.size()) - 1; }
  double at(Site x) const noexcept {
    return (x >= lo && x <= hi()) ? p[static_cast<std::size_t>(x - lo)] : 0.0;
  }
};
ProbVector reflected_invariant(const PotentialWindow& w, Parity parity, Site m_minus, Site m_plus);

// One step of the reflected chain (omega-hat_{M-} = 1, omega-hat_{M+} = 0).
ProbVector reflected_step(const PotentialWindow& w, const ProbVector& p, Site m_minus, Site m_plus);

struct Boundary {
  enum class Kind { Full, Absorbing } kind = Kind::Full;
  Site a = 0, c = 0;

  static Boundary full() { return {}; }
  static Boundary absorbing(Site a, Site c) { return {Kind::Absorbing, a, c}; }
};

struct QuenchedDist {
  std::int64_t n = 0;
  Site start = 0;
  Site lo = 0;                 // support [lo, lo + mass.size())
  std::vector<double> mass;    // zero off the parity class (n + start) mod 2
  double truncation_loss = 0.0;

  Site hi() const noexcept { return lo + static_cast<Site>(mass.size()) - 1; }
  double at(Site z) const noexcept {
    return (z >= lo && z <= hi()) ? mass[static_cast<std::size_t>(z - lo)] : 0.0;
  }
  double total() const noexcept;
  void write_csv(std::ostream& os) const;
};

// Exact law of S_n under P_omega^start by forward recursion. Full mode grows
// an extensible window to [start - n, start + n]; absorbing mode needs
// a < start < c inside the window and reports mass absorbed at a or c.
QuenchedDist quenched_dp(const PotentialWindow& w, Site start, std::int64_t n, Boundary boundary = Boundary::full(),
                         Site site_budget = kDefaultSiteBudget);

}  // namespace sinai
