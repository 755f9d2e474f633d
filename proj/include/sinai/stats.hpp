#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sinai {

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;      // sample std / sqrt(N)
  double var = 0.0;     // sample variance (N - 1 denominator)
  std::int64_t n = 0;
};

MeanEstimate mean_estimate(std::span<const double> xs);
MeanEstimate mean_estimate(std::span<const std::int64_t> xs);
// Frequency k/N with binomial stderr sqrt(p(1-p)/N).
MeanEstimate binomial_estimate(std::int64_t k, std::int64_t n);

double combined_se(double a, double b);

// Two-sample Kolmogorov-Smirnov statistic and asymptotic critical value
// c(alpha) sqrt((n+m)/(nm)) with c(alpha) = sqrt(-log(alpha/2)/2).
double ks_statistic(std::vector<double> a, std::vector<double> b);
double ks_critical(std::size_t n, std::size_t m, double alpha);

// Upper tail P(chi2_df > x).
double chi_square_sf(double x, double df);

}  // namespace sinai
