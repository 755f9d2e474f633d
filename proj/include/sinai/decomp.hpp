#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sinai/env.hpp"

namespace sinai {

enum class ExtremumKind { Min, Max };
enum class Side { Left, Right };
enum class SlopeDirection { Upward, Downward };
enum class SlopeVariant { Plain, Starred };

const char* to_string(ExtremumKind k) noexcept;
const char* to_string(Side s) noexcept;

// The one comparison every h-extremum routine uses: "upper - lower >= h".
// Scan, brute force and the stopping-time recursion must agree bit for bit,
// so none of them may rewrite this as "upper >= lower + h".
inline bool rises_by(double lower, double upper, double h) noexcept { return upper - lower >= h; }

struct ExtremumRecord {
  Site position = 0;
  ExtremumKind kind = ExtremumKind::Min;
  double value = 0.0;
  std::int64_t index = 0;

  friend bool operator==(const ExtremumRecord&, const ExtremumRecord&) = default;
};

// A slope stored by its absolute levels; t(i) = level(i) - level(0).
// Keeping raw levels makes zeta an exact involution and lets slopes cut from
// one potential glue back together without rounding.
class SlopeView {
 public:
  // Throws RangeError when `levels` is not a slope (see SlopeDirection).
  explicit SlopeView(std::vector<double> levels, std::optional<double> h = std::nullopt);

  Site length() const noexcept { return static_cast<Site>(levels_.size()) - 1; }
  double value(Site i) const { return levels_.at(static_cast<std::size_t>(i)) - levels_.front(); }
  std::vector<double> values() const;
  std::span<const double> levels() const noexcept { return levels_; }
  double height() const noexcept { return height_; }
  SlopeDirection direction() const noexcept { return direction_; }
  // e = H - h when the slope was cut at height h.
  std::optional<double> excess() const noexcept { return excess_; }

  // First index where t reaches [h, +inf) (upward) or (-inf, -h] (downward).
  Site first_passage(double h) const;

  friend bool operator==(const SlopeView& a, const SlopeView& b) { return a.values() == b.values(); }

 private:
  std::vector<double> levels_;
  double height_ = 0.0;
  SlopeDirection direction_ = SlopeDirection::Upward;
  std::optional<double> excess_;
};

// zeta(T)(i) = T(l - i) - T(l).
SlopeView zeta(const SlopeView& slope);

using Path = std::vector<double>;
// Glue(f, g): f on its domain, then g's increments continued from f's end.
Path glue(const Path& f, const Path& g);

struct ScanOptions {
  Site site_budget = kDefaultSiteBudget;
  int flank = 1;  // extra certified extrema on each side of [k_min, k_max]
};

class Decomposition {
 public:
  Decomposition(double h, Side side, std::vector<ExtremumRecord> extrema, std::int64_t k_min, std::int64_t k_max,
                std::shared_ptr<const PotentialWindow> window);

  double h() const noexcept { return h_; }
  Side side() const noexcept { return side_; }
  std::int64_t k_min() const noexcept { return k_min_; }
  std::int64_t k_max() const noexcept { return k_max_; }
  // Indices available, flank included.
  std::int64_t first_index() const noexcept { return extrema_.front().index; }
  std::int64_t last_index() const noexcept { return extrema_.back().index; }
  const std::vector<ExtremumRecord>& extrema() const noexcept { return extrema_; }
  const ExtremumRecord& x(std::int64_t k) const;
  Site position(std::int64_t k) const { return x(k).position; }
  const PotentialWindow& window() const noexcept { return *window_; }
  std::shared_ptr<const PotentialWindow> window_ptr() const noexcept { return window_; }

  // Translated slope between x_i and x_{i+1}, carrying e = H - h.
  SlopeView slope(std::int64_t i) const;

 private:
  double h_;
  Side side_;
  std::vector<ExtremumRecord> extrema_;
  std::int64_t k_min_, k_max_;
  std::shared_ptr<const PotentialWindow> window_;
};

// Online tau/m stopping-time recursion started at some site. Each completed
// stage k = 1, 2, ... yields tau_k, the first arg-extremum m_k and the last
// arg-extremum m_k^* on [tau_{k-1}, tau_k]. Odd stages look for a rise of h
// above the running minimum, even stages for a fall of h below the running max.
class ExtremaRecursion {
 public:
  struct Stage {
    Site tau;
    Site m;
    Site m_star;
    double m_value;
  };

  ExtremaRecursion(double h, Site start, double v_start);
  // Returns true when this site completes a stage.
  bool feed(Site x, double v);
  const std::vector<Stage>& stages() const noexcept { return stages_; }

 private:
  double h_;
  bool rising_ = true;
  double ext_ = 0.0;
  Site first_ = 0, last_ = 0;
  std::vector<Stage> stages_;
};

struct ScanCoverage {
  std::vector<ExtremumRecord> extrema;  // positions ascending, index unnormalized (0-based)
  Site coverage_begin = 0;              // tau_1 of the recursion started at window.lo()
  Site coverage_end = 0;                // last completed tau; extrema list is complete in between
  bool complete = false;                // true if at least one stage completed
};

// All left h-extrema of a fixed window from coverage_begin to coverage_end;
// no extension.
ScanCoverage scan_window_left_extrema(const PotentialWindow& window, double h);

Decomposition scan_left_extrema(const PotentialWindow& window, double h, std::int64_t k_min, std::int64_t k_max,
                                const ScanOptions& opts = {});

// Definitional O(n^2) transcription: every site tested against the four
// conditions with witnesses restricted to the window. Index field is
// normalized (last position <= 0 gets 0) when possible.
std::vector<ExtremumRecord> bruteforce_left_extrema(const PotentialWindow& window, double h);
std::vector<ExtremumRecord> bruteforce_right_extrema(const PotentialWindow& window, double h);

// Right extrema through x_i^*(v, h) = -x_{1-i}(v(-.), h); x_0^* < 0 <= x_1^*.
Decomposition right_extrema(const PotentialWindow& window, double h, std::int64_t k_min, std::int64_t k_max,
                            const ScanOptions& opts = {});

// b_h: x_0 if it is a left h-minimum, x_1 otherwise.
Site localization_b_h(const Decomposition& left);
// Convenience: decomposition + b_h with automatic extension.
Site compute_b_h(const PotentialWindow& window, double h, const ScanOptions& opts = {});

struct KestenPoint {
  Site b_K = 0;
  Site d_plus = 0, d_minus = 0;   // d_V(h), d_{V_-}(h)
  Site b_plus = 0, b_minus = 0;   // b_V^+(h), b_V^-(h)
  double max_plus = 0.0, max_minus = 0.0;
};
KestenPoint kesten_b_h_K(const PotentialWindow& window, double h, const ScanOptions& opts = {});

struct CanonicalSlopes {
  SlopeView up;
  SlopeView down;
  Site m1, m2, m3;
  Site tau1, tau2, tau3;
};
CanonicalSlopes extract_canonical_slopes(const PotentialWindow& window, double h, SlopeVariant variant,
                                         const ScanOptions& opts = {});

struct LadderEpochs {
  std::vector<Site> epochs;      // e_0 = 0, ..., e_L
  std::vector<double> heights;   // H_0, ..., H_{L-1} (all < h)
  std::int64_t L = 0;
  Site m1_star = 0;              // e_L
};
LadderEpochs ladder_epochs(const PotentialWindow& window, double h, const ScanOptions& opts = {});

}  // namespace sinai
