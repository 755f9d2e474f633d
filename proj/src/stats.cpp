#include "sinai/stats.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

namespace sinai {

namespace {

template <class T>
MeanEstimate mean_of(std::span<const T> xs) {
  MeanEstimate m;
  m.n = static_cast<std::int64_t>(xs.size());
  if (xs.empty()) return m;
  // Two passes in index order: deterministic for a given sample vector.
  long double s = 0;
  for (T x : xs) s += static_cast<long double>(x);
  const long double mean = s / xs.size();
  long double ss = 0;
  for (T x : xs) ss += (x - mean) * (x - mean);
  m.mean = static_cast<double>(mean);
  m.var = xs.size() > 1 ? static_cast<double>(ss / (xs.size() - 1)) : 0.0;
  m.se = std::sqrt(m.var / xs.size());
  return m;
}

}  // namespace

MeanEstimate mean_estimate(std::span<const double> xs) { return mean_of(xs); }
MeanEstimate mean_estimate(std::span<const std::int64_t> xs) { return mean_of(xs); }

MeanEstimate binomial_estimate(std::int64_t k, std::int64_t n) {
  MeanEstimate m;
  m.n = n;
  if (n <= 0) return m;
  m.mean = static_cast<double>(k) / n;
  m.var = m.mean * (1 - m.mean);
  m.se = std::sqrt(m.var / n);
  return m;
}

double combined_se(double a, double b) { return std::sqrt(a * a + b * b); }

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

double ks_critical(std::size_t n, std::size_t m, double alpha) {
  const double c = std::sqrt(-std::log(alpha / 2) / 2);
  return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

double chi_square_sf(double x, double df) {
  if (x <= 0) return 1.0;
  return boost::math::gamma_q(df / 2, x / 2);
}

}  // namespace sinai
