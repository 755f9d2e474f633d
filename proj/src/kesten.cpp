#include "sinai/kesten.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "sinai/error.hpp"

namespace sinai {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSmallX = 0.5;

DensityEval theta_branch(double ax, double tol) {
  DensityEval d;
  d.value = 0.5;
  if (ax == 0.0) return d;
  const double s = 1.0 / std::sqrt(2.0 * ax);
  for (int k = 0;; ++k) {
    const double term = std::erfc((2.0 * k + 1.0) * s);
    if (term <= tol) {
      d.error_bound = term;
      return d;
    }
    d.value += (k % 2 == 0) ? -term : term;
    d.terms_used = k + 1;
  }
}

DensityEval exp_branch(double ax, double tol) {
  DensityEval d;
  const double c = kPi * kPi * ax / 8.0;
  double sum = 0.0;
  for (int k = 0;; ++k) {
    const double m = 2.0 * k + 1.0;
    const double term = std::exp(-m * m * c) / m;
    if (term <= tol * kPi / 2.0) {
      d.error_bound = 2.0 / kPi * term;
      break;
    }
    sum += (k % 2 == 0) ? term : -term;
    d.terms_used = k + 1;
  }
  d.value = 2.0 / kPi * sum;
  return d;
}

}  // namespace

DensityEval phi_inf(double x, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::RangeError, "tol must be > 0");
  const double ax = std::fabs(x);
  DensityEval d = ax < kSmallX ? theta_branch(ax, tol) : exp_branch(ax, tol);
  d.x = x;
  return d;
}

double phi_cdf(double x, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::RangeError, "tol must be > 0");
  // First-term tail bound (2/pi)(8/pi^2) e^{-pi^2 L/8} < tol/10.
  const double cutoff = 8.0 / (kPi * kPi) * std::log(160.0 / (kPi * kPi * kPi * tol));
  if (x <= -cutoff) return 0.0;
  const double inner = tol * 1e-3;
  auto f = [&](double t) { return phi_inf(t, inner).value; };
  using boost::math::quadrature::gauss_kronrod;
  auto integrate = [&](double a, double b) { return gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol * 1e-2); };
  // The density has a kink at 0; split there.
  if (x <= 0.0) return integrate(-cutoff, x);
  return integrate(-cutoff, 0.0) + integrate(0.0, std::min(x, cutoff));
}

double llt_prediction(LltMode mode, double argument, double sigma, double scale) {
  const double s2 = sigma * sigma;
  if (mode == LltMode::Walk) {
    if (!(scale >= 3.0)) throw Error(ErrorCode::RangeError, "walk mode needs n >= 3");
    const double L2 = std::log(scale) * std::log(scale);
    return 2.0 * s2 / L2 * phi_inf(s2 * argument / L2).value;
  }
  if (!(scale > 0.0)) throw Error(ErrorCode::RangeError, "bottom mode needs h > 0");
  const double h2 = scale * scale;
  return s2 / h2 * phi_inf(s2 * argument / h2).value;
}

}  // namespace sinai
