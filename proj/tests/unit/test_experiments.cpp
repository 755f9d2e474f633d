#include <cmath>

#include "doctest.h"
#include "sinai/error.hpp"
#include "sinai/experiments.hpp"
#include "sinai/kesten.hpp"

using namespace sinai;

namespace {

const EnvLaw kTwoPoint = make_env_law(LawKind::TwoPoint, 0.3);

std::string dump(const SuiteResult& r) { return to_json(r).dump(); }

}  // namespace

TEST_CASE("b_h histogram accounting") {
  const auto grid = default_bh_grid(kTwoPoint, 6);
  const auto r = estimate_bh_law(kTwoPoint, 6, 3000, grid, RunContext{5});
  std::int64_t in_grid = 0;
  for (const auto& row : r.rows) in_grid += row["count"].get<std::int64_t>();
  CHECK(in_grid == r.summary["in_grid"].get<std::int64_t>());
  CHECK(in_grid + r.summary["overflow"].get<std::int64_t>() + r.summary["excluded"].get<std::int64_t>() == 3000);
  for (const auto& row : r.rows)
    CHECK(row["prediction"].get<double>() ==
          llt_prediction(LltMode::Bottom, row["x"].get<double>(), kTwoPoint.sigma, 6));
}

TEST_CASE("suites are byte-identical across thread counts and the serial loop") {
  const EventParams ep;
  auto run_all = [&](RunContext ctx) {
    std::string s;
    s += dump(estimate_bh_law(kTwoPoint, 5, 400, default_bh_grid(kTwoPoint, 5), ctx));
    s += dump(check_renewal_identity(kTwoPoint, 5, 400, {0, 3, -3}, ctx));
    s += dump(estimate_slope_moments(kTwoPoint, {3, 6}, 200, {1, 2}, ctx));
    s += dump(estimate_c_constants(kTwoPoint, 5, 400, {10, 100}, 400, ctx));
    s += dump(conditioned_law_check(kTwoPoint, 5, 200, ctx));
    s += dump(event_frequencies(kTwoPoint, 1 << 10, 50, 0, ep, ctx));
    s += dump(coupling_experiment(kTwoPoint, 1 << 8, 6, 0, ep, EnvFilter::None, 20, ctx));
    s += dump(verify_sinai_llt(kTwoPoint, 1 << 10, {-4, 0, 4}, 100, LltMethod::Proxy, EnvFilter::None, ep, ctx));
    s += dump(compare_llt_methods(kTwoPoint, 60, {-2, 0, 2}, 100, ctx));
    return s;
  };
  const std::string ref = run_all(RunContext{99, 1, true});
  CHECK(run_all(RunContext{99, 1}) == ref);
  CHECK(run_all(RunContext{99, 3}) == ref);
  CHECK(run_all(RunContext{100, 1}) != ref);
}

TEST_CASE("renewal right-hand side is monotone in |x| and equals 1/E[l] at 0") {
  std::vector<Site> grid;
  for (Site x = -40; x <= 40; x += 2) grid.push_back(x);
  const auto r = check_renewal_identity(kTwoPoint, 6, 2000, grid, RunContext{3});
  double prev = 0.0;
  for (const auto& row : r.rows) {
    const double rhs = row["rhs"].get<double>();
    const Site x = row["x"].get<Site>();
    if (x <= 0) CHECK(rhs >= prev);
    else CHECK(rhs <= prev);
    prev = rhs;
    if (x == 0) CHECK(rhs == doctest::Approx(1.0 / r.summary["mean_total_length"]["estimate"].get<double>()));
  }
}

TEST_CASE("conditioned walks respect their acceptance events") {
  for (auto variant : {SlopeVariant::Plain, SlopeVariant::Starred}) {
    for (std::uint64_t s = 0; s < 300; ++s) {
      const auto c = conditioned_walk_sample(kTwoPoint, 7, variant, s);
      REQUIRE(c.path.size() >= 2);
      CHECK(c.path.front() == 0.0);
      CHECK(c.path.back() >= 7);
      for (std::size_t k = 1; k + 1 < c.path.size(); ++k) {
        CHECK(c.path[k] < 7);
        if (variant == SlopeVariant::Plain) CHECK(c.path[k] >= 0);
        else CHECK(c.path[k] > 0);
      }
      CHECK(conditioned_walk_sample(kTwoPoint, 7, variant, s).path == c.path);
    }
  }
  try {
    conditioned_walk_sample(kTwoPoint, 50, SlopeVariant::Plain, 1, 3);
    FAIL("expected rejection budget error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RejectionBudgetExceeded);
  }
}

TEST_CASE("direct endpoint histogram sums to one over the parity class") {
  std::vector<Site> all;
  for (Site z = -40; z <= 40; ++z) all.push_back(z);
  const auto r = verify_sinai_llt(kTwoPoint, 40, all, 500, LltMethod::Direct, EnvFilter::None, EventParams{},
                                  RunContext{8});
  double even = 0, odd = 0;
  for (const auto& row : r.rows) (row["z"].get<Site>() % 2 == 0 ? even : odd) += row["estimate"].get<double>();
  CHECK(even == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(odd == 0.0);
  const auto dp = verify_sinai_llt(kTwoPoint, 40, all, 50, LltMethod::Dp, EnvFilter::None, EventParams{},
                                   RunContext{8});
  double s = 0;
  for (const auto& row : dp.rows) s += row["estimate"].get<double>();
  CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("E_C filtered proxy is zero when E_C cannot occur") {
  const auto r = verify_sinai_llt(kTwoPoint, 1 << 12, {0, 2}, 20, LltMethod::Proxy, EnvFilter::EC, EventParams{},
                                  RunContext{2});
  for (const auto& row : r.rows) CHECK(row["estimate"].get<double>() == 0.0);
  const auto c = coupling_experiment(kTwoPoint, 1 << 12, 5, 0, EventParams{}, EnvFilter::EC, 30, RunContext{2});
  CHECK(c.summary["accepted"].get<int>() == 0);
  CHECK(c.summary["skipped_by_filter"].get<int>() == 30);
  CHECK(!c.pass);
}

TEST_CASE("result documents round-trip and flatten to CSV") {
  const auto r = check_renewal_identity(kTwoPoint, 4, 100, {0, 1}, RunContext{1});
  const auto j = to_json(r);
  CHECK(j["schema"] == 1);
  CHECK(to_json(suite_from_json(j)) == j);
  const std::string csv = to_csv(r);
  CHECK(csv.substr(0, csv.find('\n')) == "combined_stderr,lhs,lhs_stderr,ok,rhs,rhs_stderr,x,z");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
