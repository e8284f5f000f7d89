#ifndef CMI_CRITICAL_VALUES_HPP_
#define CMI_CRITICAL_VALUES_HPP_

#include "cmi/sample.hpp"

namespace cmi {

/// Lower bound sigma_min on the interval standard deviation.
///
/// Explicit mode uses `value` as is. Schedule mode realizes
/// kappa * sd(y) * n^(-delta) with delta in (0, 1/2); the sd(y) factor makes
/// the rule invariant to the units of y.
struct TruncationRule {
  enum class Mode { Explicit, Schedule };

  Mode mode = Mode::Schedule;
  double value = 0.0;
  double kappa = 1.0;
  double delta = 0.25;

  static TruncationRule explicit_value(double sigma_min) { return {Mode::Explicit, sigma_min, 1.0, 0.25}; }
  static TruncationRule schedule(double kappa = 1.0, double delta = 0.25) {
    return {Mode::Schedule, 0.0, kappa, delta};
  }
};

struct CriticalValue {
  double c_hat = 0.0;
  double r = 0.0;
  double alpha = 0.0;
  double cv = 0.0;           ///< threshold for sqrt(n) * T_n
  double first_order = 0.0;  ///< (2 log(1 / sigma_min^2))^(1/2)
};

/// Solves exp(-exp(-r)) = 1 - alpha for r.
double gumbel_r(double alpha);

/// Standard Gumbel CDF exp(-exp(-r)).
double gumbel_cdf(double r) noexcept;

/// Plug-in scale E_n[Y^2 1{lo <= X <= hi}] / sigma_min^exponent.
///
/// The default exponent 2 makes c_hat the ratio of the contact-set variance
/// mass to the smallest admissible interval variance; exponent 1 is kept for
/// sensitivity checks.
double c_hat(const Sample& sample, double contact_lo, double contact_hi, double sigma_min, int exponent = 2);

/// Extreme-value critical value for sqrt(n) * T_n:
///
///   sqrt(2 log c) + (1.5 log log c - log(2 sqrt(pi)) + r) / sqrt(2 log c)
///
/// Requires log c > 1; throws ScaleTooSmall otherwise.
double critical_value(double c, double r);

/// First-order approximation (2 log(1 / sigma_min^2))^(1/2) of the critical
/// value for sqrt(n) * T_n.
double first_order_critical_value(double sigma_min);

/// Realizes sigma_min for `sample`. Throws InvalidSchedule for kappa <= 0 or
/// delta outside (0, 1/2), and InvalidArgument for a non-positive result.
double realize_truncation(const TruncationRule& rule, const Sample& sample);

/// c_hat, r and cv bundled for a given level.
CriticalValue make_critical_value(const Sample& sample, double contact_lo, double contact_hi, double sigma_min,
                                  double alpha, int exponent = 2);

}  // namespace cmi

#endif  // CMI_CRITICAL_VALUES_HPP_
