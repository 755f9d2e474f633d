#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sinai {

using Site = std::int64_t;

enum class LawKind { TwoPoint, LogisticUniform };

const char* to_string(LawKind kind) noexcept;
LawKind law_kind_from_string(const std::string& name);

struct Lattice {
  bool is_lattice = false;
  double span = 0.0;   // log rho lives on shift + span * Z
  double shift = 0.0;
};

// Law of omega_0. Only families with E[log rho_0] = 0 by construction ship.
struct EnvLaw {
  LawKind kind = LawKind::TwoPoint;
  double param = 0.0;     // p for two-point, half-width c for logistic-uniform
  double epsilon0 = 0.0;  // ellipticity floor
  double sigma = 0.0;     // std. dev. of log rho_0
  Lattice lattice;
  double c0 = 0.0;        // log((1 - eps0) / eps0), bound on |V(x) - V(x-1)|

  // log rho drawn from 64 random bits. For two-point the result is exactly +-a.
  double log_rho(std::uint64_t bits) const noexcept;
  // Integer lattice level increment (+1/-1) for two-point laws.
  int level_step(std::uint64_t bits) const noexcept { return (bits >> 63) ? 1 : -1; }
  // Magnitude a with log rho in {-a, +a} (two-point only).
  double two_point_step() const noexcept { return step_; }

  friend EnvLaw make_env_law(LawKind kind, double param);

 private:
  double step_ = 0.0;
};

EnvLaw make_env_law(LawKind kind, double param);

inline constexpr Site kDefaultSiteBudget = 10'000'000;

// Realization of (omega_x, V(x)) on [lo, hi]. Sampled windows are keyed by
// (master_seed, x): extending never changes already materialized sites.
// Injected windows (from_potential / from_omega) carry no law and cannot grow.
class PotentialWindow {
 public:
  static PotentialWindow sample(const EnvLaw& law, std::uint64_t master_seed, Site lo, Site hi);
  // V given directly; omega at lo is unknown (NaN), elsewhere implied by increments.
  static PotentialWindow from_potential(Site lo, std::vector<double> v);
  // omega given directly; V follows the two-sided partial-sum definition (V(0) = 0).
  static PotentialWindow from_omega(Site lo, std::vector<double> omega);

  // new_lo <= lo(), new_hi >= hi(). Throws ExtensionBudgetExceeded when the
  // result would hold more than `site_cap` sites on either side of 0, or when
  // the window is injected and the range actually grows.
  PotentialWindow extended(Site new_lo, Site new_hi, Site site_cap = kDefaultSiteBudget) const;
  PotentialWindow restricted(Site new_lo, Site new_hi) const;

  Site lo() const noexcept { return lo_; }
  Site hi() const noexcept { return lo_ + static_cast<Site>(v_.size()) - 1; }
  Site size() const noexcept { return static_cast<Site>(v_.size()); }
  bool contains(Site x) const noexcept { return x >= lo() && x <= hi(); }
  bool extensible() const noexcept { return law_.has_value(); }

  double v(Site x) const { return v_[index(x)]; }
  double omega(Site x) const { return omega_[index(x)]; }
  double operator[](Site x) const { return v(x); }

  std::span<const double> v_values() const noexcept { return v_; }
  std::span<const double> omega_values() const noexcept { return omega_; }

  const std::optional<EnvLaw>& law() const noexcept { return law_; }
  std::uint64_t master_seed() const noexcept { return seed_; }

  // Reflection v(-.) as an injected window over [-hi, -lo].
  PotentialWindow reflected() const;

 private:
  std::size_t index(Site x) const;
  void grow_right(Site new_hi);
  void grow_left(Site new_lo);

  std::optional<EnvLaw> law_;
  std::uint64_t seed_ = 0;
  std::uint64_t site_key_ = 0;
  Site lo_ = 0;
  std::vector<double> v_;
  std::vector<double> omega_;
  // Lattice levels at both ends (two-point laws store V = level * a exactly).
  std::int64_t level_lo_ = 0;
  std::int64_t level_hi_ = 0;
};

// V(0), V(1), V(2), ... of the sampled environment keyed by `master_seed`,
// generated on the fly with the same values PotentialWindow::sample produces.
// For one-sided first-passage experiments that never need the left half.
class RightPotential {
 public:
  RightPotential(const EnvLaw& law, std::uint64_t master_seed);
  Site position() const noexcept { return x_; }
  double value() const noexcept { return v_; }
  // Advances to the next site and returns V there.
  double next() noexcept;

 private:
  EnvLaw law_;
  std::uint64_t site_key_;
  Site x_ = 0;
  std::int64_t level_ = 0;
  double v_ = 0.0;
};

inline PotentialWindow sample_window(const EnvLaw& law, std::uint64_t master_seed, Site lo, Site hi) {
  return PotentialWindow::sample(law, master_seed, lo, hi);
}

inline PotentialWindow extend_window(const PotentialWindow& w, Site new_lo, Site new_hi,
                                     Site site_cap = kDefaultSiteBudget) {
  return w.extended(new_lo, new_hi, site_cap);
}

}  // namespace sinai
