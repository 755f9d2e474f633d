#pragma once

#include <cstdint>

namespace sinai {

struct DensityEval {
  double x = 0.0;
  double value = 0.0;
  int terms_used = 0;
  double error_bound = 0.0;
};

// phi_inf(x) = (2/pi) sum_k (-1)^k/(2k+1) exp(-(2k+1)^2 pi^2 |x| / 8).
// For |x| < 1/2 the equivalent theta-transformed series
//   1/2 - sum_k (-1)^k erfc((2k+1) / sqrt(2|x|))
// is summed instead; it is exact at 0 where the first one never converges.
// Both are alternating with decreasing terms, so error_bound is the first
// omitted term.
DensityEval phi_inf(double x, double tol = 1e-12);

// Integral of phi_inf from -inf to x by adaptive Gauss-Kronrod quadrature.
double phi_cdf(double x, double tol = 1e-10);

enum class LltMode { Walk, Bottom };
// Walk: 2 sigma^2/(log n)^2 phi_inf(sigma^2 z/(log n)^2), scale = n >= 3.
// Bottom: sigma^2/h^2 phi_inf(sigma^2 x/h^2), scale = h > 0.
double llt_prediction(LltMode mode, double argument, double sigma, double scale);

}  // namespace sinai
