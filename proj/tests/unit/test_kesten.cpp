#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "sinai/kesten.hpp"

using namespace sinai;

TEST_CASE("phi_inf values") {
  CHECK(std::fabs(phi_inf(0.0).value - 0.5) <= 1e-12);
  CHECK(phi_inf(1.0).value == phi_inf(-1.0).value);
  CHECK(std::fabs(phi_inf(1.0).value - 0.18537) <= 1e-4);
  // high-precision reference values
  CHECK(phi_inf(0.1).value == doctest::Approx(0.498434597741997449853).epsilon(1e-13));
  CHECK(phi_inf(0.25).value == doctest::Approx(0.454499738076816875674).epsilon(1e-13));
  CHECK(phi_inf(0.5).value == doctest::Approx(0.342722883445175994988).epsilon(1e-13));
  CHECK(phi_inf(1.0).value == doctest::Approx(0.185388714899761952697).epsilon(1e-13));
  CHECK(phi_inf(2.0).value == doctest::Approx(0.0539885222220545067441).epsilon(1e-13));
}

TEST_CASE("phi_inf error bounds are honest and the density is monotone") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-6, 6);
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng);
    for (double tol : {1e-4, 1e-8, 1e-12}) {
      const auto a = phi_inf(x, tol), b = phi_inf(x, tol / 100);
      CHECK(std::fabs(a.value - b.value) <= a.error_bound + 1e-16);
    }
  }
  double prev = phi_inf(0.0).value;
  for (int i = 1; i <= 1000; ++i) {
    const double v = phi_inf(i * 0.01).value;
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("phi_cdf against the termwise closed form") {
  CHECK(std::fabs(phi_cdf(0.0) - 0.5) <= 1e-10);
  CHECK(std::fabs(phi_cdf(25.0) - 1.0) <= 1e-8);
  CHECK(std::fabs(phi_cdf(10.0) - oracle::phi_cdf_closed(10.0)) <= 1e-9);
  double prev = 0.0;
  for (double x = -5; x <= 5; x += 0.05) {
    const double c = phi_cdf(x);
    CHECK(c >= prev - 1e-14);
    CHECK(std::fabs(c - oracle::phi_cdf_closed(x)) <= 1e-9);
    prev = c;
  }
}

TEST_CASE("llt predictions") {
  const double n = 1 << 20, L = std::log(n);
  CHECK(llt_prediction(LltMode::Walk, 0, 1.0, n) == doctest::Approx(1.0 / (L * L)).epsilon(1e-12));
  CHECK(llt_prediction(LltMode::Bottom, 0, 1.0, 10.0) == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(llt_prediction(LltMode::Walk, 0, std::sqrt(2.0), n) ==
        doctest::Approx(2 * llt_prediction(LltMode::Walk, 0, 1.0, n)).epsilon(1e-12));
}

TEST_CASE("density table speed") {
  const auto t0 = std::chrono::steady_clock::now();
  double s = 0;
  for (int i = -500; i <= 500; ++i) s += phi_inf(i * 0.01, 1e-10).value;
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(s > 0);
  CHECK(secs < 1.0);
}
