#include <cmath>
#include <numeric>

#include "doctest.h"
#include "sinai/env.hpp"
#include "sinai/error.hpp"

using namespace sinai;

TEST_CASE("two-point law constants") {
  const EnvLaw law = make_env_law(LawKind::TwoPoint, 0.3);
  CHECK(law.sigma == doctest::Approx(std::log(7.0 / 3.0)).epsilon(1e-15));
  CHECK(law.epsilon0 == 0.3);
  CHECK(law.lattice.is_lattice);
  CHECK(law.lattice.span == doctest::Approx(2 * std::log(7.0 / 3.0)));
  CHECK(law.lattice.shift == doctest::Approx(std::log(7.0 / 3.0)));
}

TEST_CASE("invalid laws") {
  auto code_of = [](LawKind k, double p) {
    try {
      make_env_law(k, p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code_of(LawKind::TwoPoint, 0.5) == ErrorCode::InvalidLaw);
  CHECK(code_of(LawKind::TwoPoint, 1.0) == ErrorCode::InvalidLaw);
  CHECK(code_of(LawKind::LogisticUniform, 0.0) == ErrorCode::InvalidLaw);
}

TEST_CASE("logistic-uniform law constants") {
  const EnvLaw law = make_env_law(LawKind::LogisticUniform, 1.0);
  CHECK(law.sigma * law.sigma == doctest::Approx(1.0 / 3.0));
  CHECK(law.epsilon0 == doctest::Approx(1.0 / (1.0 + std::exp(1.0))));
  CHECK_FALSE(law.lattice.is_lattice);
}

TEST_CASE("potential basics") {
  for (auto kind : {LawKind::TwoPoint, LawKind::LogisticUniform}) {
    const EnvLaw law = make_env_law(kind, kind == LawKind::TwoPoint ? 0.3 : 1.5);
    const auto w = PotentialWindow::sample(law, 42, -500, 500);
    CHECK(w.v(0) == 0.0);
    for (Site x = -499; x <= 500; ++x) {
      const double inc = w.v(x) - w.v(x - 1);
      CHECK(std::fabs(inc) <= law.c0 + 1e-12);
      // omega_x and the increment at x describe the same draw.
      CHECK(inc == doctest::Approx(std::log((1 - w.omega(x)) / w.omega(x))).epsilon(1e-12));
    }
  }
}

TEST_CASE("extension is order independent and restriction round-trips") {
  const EnvLaw law = make_env_law(LawKind::LogisticUniform, 2.0);
  const auto big = PotentialWindow::sample(law, 7, -300, 300);
  const auto a = PotentialWindow::sample(law, 7, -10, 10).extended(-300, 20).extended(-300, 300);
  const auto b = PotentialWindow::sample(law, 7, 0, 0).extended(0, 300).extended(-300, 300);
  for (Site x = -300; x <= 300; ++x) {
    CHECK(a.v(x) == big.v(x));
    CHECK(b.v(x) == big.v(x));
    CHECK(b.omega(x) == big.omega(x));
  }
  const auto r = big.restricted(-50, 60);
  CHECK(r.extended(-300, 300).v_values().size() == big.v_values().size());
  for (Site x = -300; x <= 300; ++x) CHECK(r.extended(-300, 300).v(x) == big.v(x));
}

TEST_CASE("two-point potentials sit exactly on the lattice") {
  const EnvLaw law = make_env_law(LawKind::TwoPoint, 0.3);
  const auto w = PotentialWindow::sample(law, 3, -2000, 2000);
  const double a = law.two_point_step();
  for (Site x = -2000; x <= 2000; ++x) {
    const double lvl = std::round(w.v(x) / a);
    CHECK(w.v(x) == lvl * a);
  }
}

TEST_CASE("budget and injected windows") {
  const EnvLaw law = make_env_law(LawKind::TwoPoint, 0.3);
  const auto w = PotentialWindow::sample(law, 1, -5, 5);
  CHECK_THROWS_AS(w.extended(-20, 5, 10), Error);
  const auto inj = PotentialWindow::from_potential(-2, {0, 1, 0, 1, 0});
  CHECK_FALSE(inj.extensible());
  CHECK_THROWS_AS(inj.extended(-3, 2), Error);
}

TEST_CASE("CLT sanity of V(n)") {
  const EnvLaw law = make_env_law(LawKind::TwoPoint, 0.3);
  const int N = 4000, n = 400;
  double s = 0, s2 = 0;
  for (int i = 0; i < N; ++i) {
    const double v = PotentialWindow::sample(law, 1000 + i, 0, n).v(n);
    s += v;
    s2 += v * v;
  }
  const double mean = s / N, var = s2 / N - mean * mean;
  CHECK(std::fabs(mean) < 4 * std::sqrt(n) * law.sigma / std::sqrt(N));
  CHECK(var / (n * law.sigma * law.sigma) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("right potential stream matches sampled windows") {
  for (auto kind : {LawKind::TwoPoint, LawKind::LogisticUniform}) {
    const EnvLaw law = make_env_law(kind, kind == LawKind::TwoPoint ? 0.3 : 1.0);
    const auto w = PotentialWindow::sample(law, 55, -3, 1000);
    RightPotential r(law, 55);
    for (Site x = 1; x <= 1000; ++x) CHECK(r.next() == w.v(x));
  }
}
