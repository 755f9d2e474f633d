#include "sinai/env.hpp"

#include <cmath>
#include <limits>

#include "sinai/error.hpp"
#include "sinai/rng.hpp"

namespace sinai {

const char* to_string(LawKind kind) noexcept {
  return kind == LawKind::TwoPoint ? "two-point" : "logistic-uniform";
}

LawKind law_kind_from_string(const std::string& name) {
  if (name == "two-point") return LawKind::TwoPoint;
  if (name == "logistic-uniform") return LawKind::LogisticUniform;
  throw Error(ErrorCode::InvalidLaw, "unknown law kind '" + name + "'");
}

double EnvLaw::log_rho(std::uint64_t bits) const noexcept {
  if (kind == LawKind::TwoPoint) return level_step(bits) * step_;
  return param * (2.0 * to_unit(bits) - 1.0);
}

EnvLaw make_env_law(LawKind kind, double param) {
  EnvLaw law;
  law.kind = kind;
  law.param = param;
  if (!std::isfinite(param)) throw Error(ErrorCode::InvalidLaw, "non-finite parameter");
  if (kind == LawKind::TwoPoint) {
    if (!(param > 0.0 && param < 1.0)) throw Error(ErrorCode::InvalidLaw, "two-point p must lie in (0, 1)");
    if (param == 0.5) throw Error(ErrorCode::InvalidLaw, "two-point p = 1/2 gives sigma = 0");
    const double a = std::log((1.0 - param) / param);
    law.step_ = a;
    law.sigma = std::fabs(a);
    law.epsilon0 = std::min(param, 1.0 - param);
    law.lattice = Lattice{true, 2.0 * law.sigma, law.sigma};
  } else {
    if (!(param > 0.0)) throw Error(ErrorCode::InvalidLaw, "logistic-uniform half-width must be > 0");
    law.sigma = param / std::sqrt(3.0);
    law.epsilon0 = 1.0 / (1.0 + std::exp(param));
    law.lattice = Lattice{};
  }
  law.c0 = std::log((1.0 - law.epsilon0) / law.epsilon0);
  if (!(law.sigma > 0.0) || !(law.epsilon0 > 0.0 && law.epsilon0 < 0.5))
    throw Error(ErrorCode::InvalidLaw, "law violates ellipticity or sigma > 0");
  return law;
}

namespace {

double omega_from_log_rho(double lr) { return 1.0 / (1.0 + std::exp(lr)); }

}  // namespace

PotentialWindow PotentialWindow::sample(const EnvLaw& law, std::uint64_t master_seed, Site lo, Site hi) {
  if (lo > 0 || hi < 0) throw Error(ErrorCode::RangeError, "window must satisfy lo <= 0 <= hi");
  PotentialWindow w;
  w.law_ = law;
  w.seed_ = master_seed;
  w.site_key_ = derive_key(master_seed, 0x517e);
  w.lo_ = 0;
  w.v_.assign(1, 0.0);
  const std::uint64_t bits0 = site_bits(w.site_key_, 0);
  w.omega_.assign(1, law.kind == LawKind::TwoPoint
                         ? (law.level_step(bits0) > 0 ? law.param : 1.0 - law.param)
                         : omega_from_log_rho(law.log_rho(bits0)));
  w.grow_right(hi);
  w.grow_left(lo);
  return w;
}

PotentialWindow PotentialWindow::from_potential(Site lo, std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::RangeError, "empty potential");
  PotentialWindow w;
  w.lo_ = lo;
  w.omega_.resize(v.size());
  w.omega_[0] = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 1; i < v.size(); ++i) w.omega_[i] = omega_from_log_rho(v[i] - v[i - 1]);
  w.v_ = std::move(v);
  return w;
}

PotentialWindow PotentialWindow::from_omega(Site lo, std::vector<double> omega) {
  if (omega.empty()) throw Error(ErrorCode::RangeError, "empty environment");
  const Site hi = lo + static_cast<Site>(omega.size()) - 1;
  if (lo > 0 || hi < 0) throw Error(ErrorCode::RangeError, "window must satisfy lo <= 0 <= hi");
  PotentialWindow w;
  w.lo_ = lo;
  w.v_.assign(omega.size(), 0.0);
  for (double om : omega)
    if (!(om > 0.0 && om < 1.0)) throw Error(ErrorCode::RangeError, "omega must lie in (0, 1)");
  auto lr = [&](Site x) { return std::log((1.0 - omega[x - lo]) / omega[x - lo]); };
  for (Site x = 1; x <= hi; ++x) w.v_[x - lo] = w.v_[x - 1 - lo] + lr(x);
  for (Site x = -1; x >= lo; --x) w.v_[x - lo] = w.v_[x + 1 - lo] - lr(x + 1);
  w.omega_ = std::move(omega);
  return w;
}

std::size_t PotentialWindow::index(Site x) const {
  if (!contains(x))
    throw Error(ErrorCode::RangeError,
                "site " + std::to_string(x) + " outside [" + std::to_string(lo()) + ", " + std::to_string(hi()) + "]");
  return static_cast<std::size_t>(x - lo_);
}

void PotentialWindow::grow_right(Site new_hi) {
  const Site old_hi = hi();
  if (new_hi <= old_hi) return;
  const EnvLaw& law = *law_;
  v_.reserve(static_cast<std::size_t>(new_hi - lo_ + 1));
  omega_.reserve(v_.capacity());
  double v = v_.back();
  for (Site x = old_hi + 1; x <= new_hi; ++x) {
    const std::uint64_t bits = site_bits(site_key_, x);
    if (law.kind == LawKind::TwoPoint) {
      const int step = law.level_step(bits);
      level_hi_ += step;
      v = static_cast<double>(level_hi_) * law.two_point_step();
      omega_.push_back(step > 0 ? law.param : 1.0 - law.param);
    } else {
      const double lr = law.log_rho(bits);
      v += lr;
      omega_.push_back(omega_from_log_rho(lr));
    }
    v_.push_back(v);
  }
}

void PotentialWindow::grow_left(Site new_lo) {
  if (new_lo >= lo_) return;
  const EnvLaw& law = *law_;
  const std::size_t extra = static_cast<std::size_t>(lo_ - new_lo);
  std::vector<double> v(extra), om(extra);
  double cur = v_.front();
  // V(x) = V(x + 1) - log rho_{x+1}; omega_x is drawn for the new site x itself.
  for (Site x = lo_ - 1; x >= new_lo; --x) {
    const std::uint64_t bits_right = site_bits(site_key_, x + 1);
    const std::uint64_t bits = site_bits(site_key_, x);
    const std::size_t i = static_cast<std::size_t>(x - new_lo);
    if (law.kind == LawKind::TwoPoint) {
      level_lo_ -= law.level_step(bits_right);
      cur = static_cast<double>(level_lo_) * law.two_point_step();
      om[i] = law.level_step(bits) > 0 ? law.param : 1.0 - law.param;
    } else {
      cur -= law.log_rho(bits_right);
      om[i] = omega_from_log_rho(law.log_rho(bits));
    }
    v[i] = cur;
  }
  v.insert(v.end(), v_.begin(), v_.end());
  om.insert(om.end(), omega_.begin(), omega_.end());
  v_ = std::move(v);
  omega_ = std::move(om);
  lo_ = new_lo;
}

PotentialWindow PotentialWindow::extended(Site new_lo, Site new_hi, Site site_cap) const {
  if (new_lo > lo() || new_hi < hi()) throw Error(ErrorCode::RangeError, "extension must contain the window");
  if (new_lo == lo() && new_hi == hi()) return *this;
  if (!extensible()) throw Error(ErrorCode::ExtensionBudgetExceeded, "injected window cannot be extended");
  if (-new_lo > site_cap || new_hi > site_cap)
    throw Error(ErrorCode::ExtensionBudgetExceeded,
                "extension to [" + std::to_string(new_lo) + ", " + std::to_string(new_hi) + "] exceeds cap " +
                    std::to_string(site_cap));
  PotentialWindow w = *this;
  w.grow_right(new_hi);
  w.grow_left(new_lo);
  return w;
}

PotentialWindow PotentialWindow::restricted(Site new_lo, Site new_hi) const {
  if (new_lo < lo() || new_hi > hi() || new_lo > new_hi)
    throw Error(ErrorCode::RangeError, "restriction must lie inside the window");
  PotentialWindow w = *this;
  const auto b = static_cast<std::ptrdiff_t>(new_lo - lo_);
  const auto e = static_cast<std::ptrdiff_t>(new_hi - lo_ + 1);
  w.v_.assign(v_.begin() + b, v_.begin() + e);
  w.omega_.assign(omega_.begin() + b, omega_.begin() + e);
  if (law_ && law_->kind == LawKind::TwoPoint) {
    const double a = law_->two_point_step();
    w.level_lo_ = std::llround(w.v_.front() / a);
    w.level_hi_ = std::llround(w.v_.back() / a);
  }
  // A restriction not containing 0 cannot be re-extended consistently.
  if (new_lo > 0 || new_hi < 0) w.law_.reset();
  w.lo_ = new_lo;
  return w;
}

PotentialWindow PotentialWindow::reflected() const {
  std::vector<double> v(v_.rbegin(), v_.rend());
  return from_potential(-hi(), std::move(v));
}

RightPotential::RightPotential(const EnvLaw& law, std::uint64_t master_seed)
    : law_(law), site_key_(derive_key(master_seed, 0x517e)) {}

double RightPotential::next() noexcept {
  ++x_;
  const std::uint64_t bits = site_bits(site_key_, x_);
  if (law_.kind == LawKind::TwoPoint) {
    level_ += law_.level_step(bits);
    v_ = static_cast<double>(level_) * law_.two_point_step();
  } else {
    v_ += law_.log_rho(bits);
  }
  return v_;
}

}  // namespace sinai
