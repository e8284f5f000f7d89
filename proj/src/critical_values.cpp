#include "cmi/critical_values.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cmi/error.hpp"

namespace cmi {

double gumbel_r(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  // log1p keeps precision for small alpha.
  return -std::log(-std::log1p(-alpha));
}

double gumbel_cdf(double r) noexcept { return std::exp(-std::exp(-r)); }

double c_hat(const Sample& sample, double contact_lo, double contact_hi, double sigma_min, int exponent) {
  if (!(contact_lo <= contact_hi)) {
    throw Error(ErrorCode::InvalidArgument, "contact set requires lo <= hi");
  }
  if (!(sigma_min > 0.0) || !std::isfinite(sigma_min)) {
    throw Error(ErrorCode::InvalidArgument, "sigma_min must be positive and finite");
  }
  if (exponent != 1 && exponent != 2) {
    throw Error(ErrorCode::InvalidArgument, "c exponent must be 1 or 2");
  }
  const auto& x = sample.x();
  const double* first = x.data();
  const double* last = x.data() + x.size();
  const auto b = std::lower_bound(first, last, contact_lo) - first;
  const auto e = std::upper_bound(first, last, contact_hi) - first;
  if (e <= b) {
    throw Error(ErrorCode::EmptyContactSet,
                "no observations in [" + std::to_string(contact_lo) + ", " + std::to_string(contact_hi) + "]");
  }
  const double mass = (sample.p2()(e) - sample.p2()(b)) / static_cast<double>(sample.size());
  return mass / std::pow(sigma_min, exponent);
}

double critical_value(double c, double r) {
  const double log_c = std::log(c);
  if (!(log_c > 1.0)) {
    throw Error(ErrorCode::ScaleTooSmall,
                "log(c) = " + std::to_string(log_c) + " must exceed 1; decrease sigma_min");
  }
  const double root = std::sqrt(2.0 * log_c);
  const double shift = 1.5 * std::log(log_c) - std::log(2.0 * std::sqrt(std::numbers::pi)) + r;
  return root + shift / root;
}

double first_order_critical_value(double sigma_min) {
  if (!(sigma_min > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sigma_min must be positive");
  }
  return std::sqrt(2.0 * std::log(1.0 / (sigma_min * sigma_min)));
}

double realize_truncation(const TruncationRule& rule, const Sample& sample) {
  double sigma = 0.0;
  if (rule.mode == TruncationRule::Mode::Explicit) {
    sigma = rule.value;
  } else {
    if (!(rule.kappa > 0.0) || !std::isfinite(rule.kappa)) {
      throw Error(ErrorCode::InvalidSchedule, "kappa must be positive");
    }
    if (!(rule.delta > 0.0 && rule.delta < 0.5)) {
      throw Error(ErrorCode::InvalidSchedule, "delta must lie in (0, 1/2), got " + std::to_string(rule.delta));
    }
    const double n = static_cast<double>(sample.size());
    sigma = rule.kappa * outcome_sd(sample) * std::pow(n, -rule.delta);
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "realized sigma_min must be positive and finite");
  }
  return sigma;
}

CriticalValue make_critical_value(const Sample& sample, double contact_lo, double contact_hi, double sigma_min,
                                  double alpha, int exponent) {
  CriticalValue out;
  out.alpha = alpha;
  out.r = gumbel_r(alpha);
  out.c_hat = c_hat(sample, contact_lo, contact_hi, sigma_min, exponent);
  out.first_order = first_order_critical_value(sigma_min);
  out.cv = critical_value(out.c_hat, out.r);
  return out;
}

}  // namespace cmi
