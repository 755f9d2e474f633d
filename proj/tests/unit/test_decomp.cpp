#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "sinai/decomp.hpp"
#include "sinai/error.hpp"
#include "generators.hpp"

using namespace sinai;

namespace {

PotentialWindow v_shape(Site r) {
  std::vector<double> v;
  for (Site k = -r; k <= r; ++k) v.push_back(static_cast<double>(std::abs(k)));
  return PotentialWindow::from_potential(-r, v);
}

// The counterexample window, padded with one extra swing of height h+1 on
// each side so that its neighbours are certified.
PotentialWindow paper_window(int h) {
  std::vector<std::pair<Site, double>> pts;
  for (Site k = -h - 1; k <= h + 1; ++k) {
    double v;
    if (k >= -1 && k <= 1) v = 0;
    else if (k > 1) v = k - 1;
    else if (k >= -h) v = std::abs(k) - 1;
    else v = h + 1;
    pts.push_back({k, v});
  }
  std::vector<double> left, right;
  for (int j = 1; j <= h + 1; ++j) left.push_back(h + 1 - j);       // down to 0
  for (int j = 1; j <= 2 * h + 2; ++j) left.push_back(j);           // back up
  for (int j = 1; j <= h + 1; ++j) right.push_back(h - j);          // down to -1
  for (int j = 1; j <= 2 * h + 2; ++j) right.push_back(-1 + j);     // up again
  std::vector<double> v(left.rbegin(), left.rend());
  const Site lo = -h - 1 - static_cast<Site>(left.size());
  for (auto& p : pts) v.push_back(p.second);
  v.insert(v.end(), right.begin(), right.end());
  return PotentialWindow::from_potential(lo, v);
}

}  // namespace

TEST_CASE("V-shaped valley") {
  const auto w = v_shape(10);
  const auto d = scan_left_extrema(w, 3, 0, 0, {.flank = 0});
  CHECK(d.x(0).position == 0);
  CHECK(d.x(0).kind == ExtremumKind::Min);
  CHECK(compute_b_h(w, 3) == 0);
  CHECK(kesten_b_h_K(w, 3).b_K == 0);
  auto bf = bruteforce_left_extrema(w, 3);
  REQUIRE(bf.size() == 1);
  CHECK(bf[0].position == 0);
  auto rb = bruteforce_right_extrema(w, 3);
  REQUIRE(rb.size() == 1);
  CHECK(rb[0].position == 0);
  CHECK(rb[0].index == 1);
}

TEST_CASE("counterexample window: b_h = -1, b_h^(K) = 0") {
  for (int h : {2, 3, 5, 8}) {
    const auto w = paper_window(h);
    const auto d = scan_left_extrema(w, h, 0, 1, {.flank = 0});
    CHECK(d.x(0).position == -1);
    CHECK(localization_b_h(d) == -1);
    const auto k = kesten_b_h_K(w, h);
    CHECK(k.b_K == 0);
    CHECK(k.b_plus == 0);
  }
}

TEST_CASE("degenerate windows") {
  std::vector<double> inc(50), flat(50, 0.0);
  std::iota(inc.begin(), inc.end(), 0.0);
  const auto mono = PotentialWindow::from_potential(0, inc);
  for (const auto& e : bruteforce_left_extrema(mono, 2)) CHECK((e.position == 0 || e.position == 49));
  CHECK(bruteforce_left_extrema(PotentialWindow::from_potential(-25, flat), 0.5).empty());
  CHECK_THROWS_AS(scan_left_extrema(PotentialWindow::from_potential(-25, flat), 0.5, 0, 1), Error);
}

TEST_CASE("scan agrees with brute force on random windows") {
  std::mt19937_64 rng(11);
  int compared = 0;
  for (int rep = 0; rep < 2000; ++rep) {
    double h;
    const auto w = gen::random_window(rng, h);
    const auto cov = scan_window_left_extrema(w, h);
    auto bf = bruteforce_left_extrema(w, h);
    if (!cov.complete) continue;
    const auto lhs = gen::in_range(cov.extrema, cov.coverage_begin, cov.coverage_end);
    const auto rhs = gen::in_range(bf, cov.coverage_begin, cov.coverage_end);
    CHECK(lhs == rhs);
    // alternation
    for (std::size_t i = 1; i < cov.extrema.size(); ++i) CHECK(cov.extrema[i].kind != cov.extrema[i - 1].kind);
    ++compared;
  }
  CHECK(compared > 1000);
}

TEST_CASE("duality and b_h on sampled environments") {
  for (auto kind : {LawKind::TwoPoint, LawKind::LogisticUniform}) {
    const EnvLaw law = make_env_law(kind, kind == LawKind::TwoPoint ? 0.3 : 1.0);
    for (std::uint64_t s = 0; s < 200; ++s) {
      const double h = 2.0 + (s % 5);
      const auto w = PotentialWindow::sample(law, s, -20, 20);
      const auto right = right_extrema(w, h, -1, 2);
      const auto left_ref = scan_left_extrema(w.extended(right.window().lo(), right.window().hi()).reflected(), h,
                                              -1, 2, {.flank = 0});
      CHECK(right.x(0).position < 0);
      CHECK(right.x(1).position >= 0);
      for (std::int64_t i = -1; i <= 2; ++i) CHECK(right.x(i).position == -left_ref.x(1 - i).position);
      for (std::int64_t i = right.first_index() + 1; i <= right.last_index(); ++i)
        CHECK(right.x(i).kind != right.x(i - 1).kind);

      const auto left = scan_left_extrema(w, h, -2, 2);
      CHECK(left.x(0).position <= 0);
      CHECK(left.x(1).position > 0);
      const Site b = localization_b_h(left);
      CHECK(b == compute_b_h(w, h));
      // b_h is a left h-minimum: check against the brute force on the grown window.
      const auto bf = bruteforce_left_extrema(left.window(), h);
      CHECK(std::any_of(bf.begin(), bf.end(), [&](auto& e) { return e.position == b && e.kind == ExtremumKind::Min; }));
      // Right extrema against their own brute force.
      const auto rbf = bruteforce_right_extrema(right.window(), h);
      for (std::int64_t i = right.first_index(); i <= right.last_index(); ++i) {
        const auto& r = right.x(i);
        CHECK(std::any_of(rbf.begin(), rbf.end(),
                          [&](auto& e) { return e.position == r.position && e.kind == r.kind; }));
      }
    }
  }
}

TEST_CASE("slopes of a decomposition: heights, excess and exact reconstruction") {
  const EnvLaw law = make_env_law(LawKind::LogisticUniform, 1.0);
  for (std::uint64_t s = 0; s < 100; ++s) {
    const double h = 3.0;
    const auto d = scan_left_extrema(PotentialWindow::sample(law, s, -10, 10), h, -3, 3);
    Path rebuilt;
    for (std::int64_t i = -3; i < 3; ++i) {
      const auto t = d.slope(i);
      CHECK(t.height() >= h);
      CHECK(*t.excess() >= 0.0);
      CHECK((t.direction() == SlopeDirection::Upward) == (d.x(i).kind == ExtremumKind::Min));
      const auto lv = t.levels();
      rebuilt = rebuilt.empty() ? Path(lv.begin(), lv.end()) : glue(rebuilt, Path(lv.begin(), lv.end()));
    }
    const Site a = d.position(-3);
    for (std::size_t j = 0; j < rebuilt.size(); ++j) CHECK(rebuilt[j] == d.window().v(a + static_cast<Site>(j)));
  }
}

TEST_CASE("zeta and glue") {
  const SlopeView t({0, 1, 3});
  const auto z = zeta(t);
  CHECK(z.values() == std::vector<double>{0, -2, -3});
  CHECK(z.direction() == SlopeDirection::Downward);
  CHECK(glue({0, 1}, {5, 7}) == Path{0, 1, 3});

  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> lv{g(rng)};
    const int n = 1 + rep % 30;
    for (int i = 0; i < n; ++i) lv.push_back(lv.back() + g(rng));
    // force slope shape: minimum first, maximum last
    const double mn = *std::min_element(lv.begin(), lv.end()), mx = *std::max_element(lv.begin(), lv.end());
    lv.front() = mn - 1.0;
    lv.back() = mx + 1.0;
    const SlopeView s(lv);
    CHECK(zeta(zeta(s)) == s);
    CHECK(zeta(zeta(s)).values() == s.values());

    Path f, gg, k;
    for (int i = 0; i < 1 + rep % 7; ++i) f.push_back(std::round(g(rng) * 100));
    for (int i = 0; i < 1 + rep % 5; ++i) gg.push_back(std::round(g(rng) * 100));
    for (int i = 0; i < 1 + rep % 3; ++i) k.push_back(std::round(g(rng) * 100));
    CHECK(glue(glue(f, gg), k) == glue(f, glue(gg, k)));
    CHECK(glue(f, gg).size() == f.size() + gg.size() - 1);
  }
}

TEST_CASE("canonical slopes and ladder epochs") {
  for (auto kind : {LawKind::TwoPoint, LawKind::LogisticUniform}) {
    const EnvLaw law = make_env_law(kind, kind == LawKind::TwoPoint ? 0.3 : 1.0);
    for (std::uint64_t s = 0; s < 500; ++s) {
      const double h = 4.0;
      const auto w = PotentialWindow::sample(law, 900 + s, 0, 10);
      const auto plain = extract_canonical_slopes(w, h, SlopeVariant::Plain);
      CHECK(plain.up.direction() == SlopeDirection::Upward);
      CHECK(plain.down.direction() == SlopeDirection::Downward);
      CHECK(plain.up.height() >= h);
      CHECK(plain.down.height() >= h);
      CHECK(plain.up.length() == plain.m2 - plain.m1);
      const auto star = extract_canonical_slopes(w, h, SlopeVariant::Starred);
      CHECK(star.m1 >= plain.m1);
      const auto lad = ladder_epochs(w, h);
      CHECK(lad.epochs.front() == 0);
      CHECK(lad.m1_star == star.m1);
      const auto ww = w.extended(0, std::max<Site>(10, lad.epochs.back()));
      for (std::size_t i = 1; i < lad.epochs.size(); ++i) CHECK(ww.v(lad.epochs[i]) <= ww.v(lad.epochs[i - 1]));
      for (double H : lad.heights) CHECK(H < h);
    }
  }
}
