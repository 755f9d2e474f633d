#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "sinai/parallel.hpp"
#include "sinai/rng.hpp"
#include "sinai/stats.hpp"

using namespace sinai;

TEST_CASE("mean and binomial estimates") {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto m = mean_estimate(xs);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.var == doctest::Approx(5.0 / 3.0));
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 12.0)));
  const auto b = binomial_estimate(30, 100);
  CHECK(b.mean == doctest::Approx(0.3));
  CHECK(b.se == doctest::Approx(std::sqrt(0.21 / 100)));
  CHECK(combined_se(3, 4) == doctest::Approx(5));
}

TEST_CASE("KS statistic against the oracle, critical value, chi-square tail") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(1 + rng() % 50), b(1 + rng() % 50);
    for (auto& x : a) x = static_cast<double>(rng() % 20);
    for (auto& x : b) x = static_cast<double>(rng() % 25);
    CHECK(ks_statistic(a, b) == doctest::Approx(oracle::ks_statistic(a, b)).epsilon(1e-12));
  }
  CHECK(ks_critical(10000, 10000, 0.01) == doctest::Approx(1.6276 * std::sqrt(2.0 / 10000)).epsilon(1e-3));
  CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(chi_square_sf(0, 3) == 1.0);
}

TEST_CASE("parallel map matches the serial reference for any thread count") {
  auto f = [](std::int64_t i) {
    CounterRng r(derive_key(11, static_cast<std::uint64_t>(i)));
    double s = 0;
    for (int k = 0; k < 100; ++k) s += r.uniform();
    return s;
  };
  const auto ref = map_replicates_serial<double>(5000, f);
  for (int t : {1, 2, 3, 8}) CHECK(map_replicates<double>(5000, t, f) == ref);
}

TEST_CASE("parallel map rethrows the lowest failing replicate") {
  auto f = [](std::int64_t i) -> int {
    if (i == 700 || i == 3000) throw std::runtime_error(std::to_string(i));
    return static_cast<int>(i);
  };
  for (int t : {1, 4}) {
    try {
      map_replicates<int>(4000, t, f);
      FAIL("no throw");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "700");
    }
  }
}
