#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "sinai/error.hpp"
#include "sinai/quenched.hpp"

using namespace sinai;

TEST_CASE("hit_prob small cases") {
  const auto flat = PotentialWindow::from_potential(0, std::vector<double>(11, 0.0));
  CHECK(hit_prob(flat, 0, 3, 10) == doctest::Approx(0.3).epsilon(1e-15));
  const auto two = PotentialWindow::from_potential(0, {0.0, std::log(2.0), 0.0});
  CHECK(hit_prob(two, 0, 1, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(hit_prob(flat, 3, 3, 5), Error);
  CHECK_THROWS_AS(hit_prob(flat, 0, 3, 11), Error);
}

TEST_CASE("hit_prob vs harmonic solve, complement and shift invariance") {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> wid(3, 200);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = wid(rng);
    const auto w = oracle::random_omega_window(rng, -n / 2, n - n / 2, rep % 2 == 0);
    std::uniform_int_distribution<Site> pick(w.lo() + 1, w.hi() - 1);
    const Site a = w.lo(), c = w.hi(), b = pick(rng);
    const double p = hit_prob(w, a, b, c);
    CHECK(std::fabs(p - oracle::harmonic_hit(w, a, b, c)) <= 1e-10);
    CHECK(std::fabs(p + hit_prob_lower(w, a, b, c) - 1.0) <= 1e-12);
    std::vector<double> shifted(w.v_values().begin(), w.v_values().end());
    for (auto& v : shifted) v += 250.0;
    const auto ws = PotentialWindow::from_potential(w.lo(), shifted);
    CHECK(std::fabs(hit_prob(ws, a, b, c) - p) <= 1e-12);
  }
}

TEST_CASE("reversible measure") {
  const auto flat = PotentialWindow::from_potential(-5, std::vector<double>(11, 0.0));
  const auto m = reversible_measure(flat, -4, 5);
  for (Site x = -4; x <= 5; ++x) CHECK(m.value(x) == doctest::Approx(2.0));
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const auto w = oracle::random_omega_window(rng, -60, 60, rep % 2);
    const auto mu = reversible_measure(w, -59, 60);
    for (Site x = -59; x < 60; ++x) {
      CHECK(mu.scaled_at(x) > 0.0);
      const double lhs = mu.scaled_at(x) * w.omega(x), rhs = mu.scaled_at(x + 1) * (1 - w.omega(x + 1));
      CHECK(std::fabs(lhs - rhs) <= 1e-14 * std::max(1.0, std::fabs(lhs)));
    }
  }
}

TEST_CASE("reflected invariant measure") {
  const auto flat = PotentialWindow::from_potential(-5, std::vector<double>(11, 0.0));
  const auto nu = reflected_invariant(flat, Parity::Even, -2, 2);
  CHECK(nu.at(-2) == doctest::Approx(0.25));
  CHECK(nu.at(0) == doctest::Approx(0.5));
  CHECK(nu.at(2) == doctest::Approx(0.25));
  CHECK(nu.at(1) == 0.0);
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 200; ++rep) {
    const auto w = oracle::random_omega_window(rng, -80, 80, rep % 2);
    std::uniform_int_distribution<Site> pick(-80, 80);
    Site a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const Parity par = rep % 3 == 0 ? Parity::Odd : Parity::Even;
    const auto v = reflected_invariant(w, par, a, b);
    double s = 0;
    for (double x : v.p) s += x;
    CHECK(std::fabs(s - 1.0) <= 1e-12);
    const auto two = reflected_step(w, reflected_step(w, v, a, b), a, b);
    for (Site x = a; x <= b; ++x) CHECK(std::fabs(two.at(x) - v.at(x)) <= 1e-12);
  }
}

TEST_CASE("quenched DP") {
  const auto half = PotentialWindow::from_omega(-3, std::vector<double>(7, 0.5));
  const auto d = quenched_dp(half, 0, 2);
  CHECK(d.at(-2) == doctest::Approx(0.25));
  CHECK(d.at(0) == doctest::Approx(0.5));
  CHECK(d.at(2) == doctest::Approx(0.25));
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto w = oracle::random_omega_window(rng, -13, 13, rep % 2);
    const auto one = quenched_dp(w, 1, 1);
    CHECK(one.at(2) == w.omega(1));
    CHECK(one.at(0) == 1.0 - w.omega(1));
    const auto dp = quenched_dp(w, 0, 12);
    const auto en = oracle::enumerate_paths(w, 0, 12);
    for (Site z = -12; z <= 12; ++z) {
      const double e = en.count(z) ? en.at(z) : 0.0;
      CHECK(std::fabs(dp.at(z) - e) <= 1e-14);
      if ((z % 2) != 0) CHECK(dp.at(z) == 0.0);
    }
    CHECK(std::fabs(dp.total() - 1.0) <= 1e-12);
    const auto ab = quenched_dp(w, 0, 40, Boundary::absorbing(-6, 5));
    CHECK(std::fabs(ab.total() + ab.truncation_loss - 1.0) <= 1e-12);
    CHECK(ab.truncation_loss > 0.0);
  }
  std::ostringstream os;
  d.write_csv(os);
  CHECK(os.str().rfind("# n=2 start=0", 0) == 0);
}
