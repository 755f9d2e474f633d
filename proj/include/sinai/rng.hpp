#pragma once

#include <cstdint>

namespace sinai {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Derives an independent 64-bit key from a parent key and an index.
// Used for replicate seeds, per-walker sub-streams and site keys alike.
constexpr std::uint64_t derive_key(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(mix64(parent ^ 0x5851f42d4c957f2dULL) + (index + 1) * kGoldenGamma);
}

// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Counter-based stream: the k-th draw is a pure function of (key, k), so a
// stream can be replayed or split without shared state.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterRng(std::uint64_t key) noexcept : key_(mix64(key)) {}

  constexpr std::uint64_t operator()() noexcept { return mix64(key_ + (++counter_) * kGoldenGamma); }
  constexpr double uniform() noexcept { return to_unit((*this)()); }

  constexpr std::uint64_t counter() const noexcept { return counter_; }
  static constexpr std::uint64_t min() noexcept { return 0; }
  static constexpr std::uint64_t max() noexcept { return ~std::uint64_t{0}; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Site-keyed draw: the value attached to integer site x under a master seed.
constexpr std::uint64_t site_bits(std::uint64_t site_key, std::int64_t x) noexcept {
  return mix64(site_key + static_cast<std::uint64_t>(x) * kGoldenGamma);
}

}  // namespace sinai
