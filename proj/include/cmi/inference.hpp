#ifndef CMI_INFERENCE_HPP_
#define CMI_INFERENCE_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "cmi/critical_values.hpp"
#include "cmi/sample.hpp"
#include "cmi/scan.hpp"

namespace cmi {

/// Where the moment inequality is assumed to bind, used to calibrate c_hat.
/// Any superset of the true contact set gives a conservative test.
struct ContactSetSpec {
  enum class Mode { FullSupport, Explicit, Estimated };

  Mode mode = Mode::FullSupport;
  double lo = 0.0;
  double hi = 0.0;
  /// Estimated mode: half-width of the local-average window; 0 selects
  /// n^(-1/5) * range(x).
  double bandwidth = 0.0;
  double multiplier = 2.0;

  static ContactSetSpec full_support() { return {}; }
  static ContactSetSpec bounds(double lo, double hi) { return {Mode::Explicit, lo, hi, 0.0, 2.0}; }
  static ContactSetSpec estimated(double bandwidth = 0.0, double multiplier = 2.0) {
    return {Mode::Estimated, 0.0, 0.0, bandwidth, multiplier};
  }
};

struct TestConfig {
  TruncationRule truncation = TruncationRule::schedule();
  ContactSetSpec contact = ContactSetSpec::full_support();
  double alpha = 0.05;
  int c_exponent = 2;
};

struct ReportFlags {
  bool no_feasible_interval = false;
  bool scale_too_small = false;
  bool empty_contact_set = false;

  friend bool operator==(const ReportFlags&, const ReportFlags&) = default;
};

struct TestReport {
  std::size_t n = 0;
  double sigma_min = 0.0;
  double contact_lo = 0.0;
  double contact_hi = 0.0;
  double c_hat = 0.0;  ///< NaN when the contact set is empty
  double r = 0.0;
  double alpha = 0.0;
  double inf_value = 0.0;  ///< +inf when no interval is feasible
  double t_n = 0.0;
  double statistic = 0.0;           ///< sqrt(n) * T_n
  std::optional<double> cv;         ///< absent when c_hat is unusable
  double first_order = 0.0;
  bool reject = false;
  std::optional<GroupRange> argmin_groups;
  std::optional<std::pair<double, double>> argmin_x;  ///< [x_lo, x_hi] of the minimizing interval
  std::size_t feasible_count = 0;
  ReportFlags flags;
  TestConfig config;
  /// Bonferroni runs with K >= 2: one report per coordinate, each at alpha / K.
  std::vector<TestReport> coordinates;
  std::optional<std::size_t> driving_coordinate;
};

struct ContactBounds {
  double lo = 0.0;
  double hi = 0.0;
  bool fallback = false;  ///< estimate was empty, full support returned
};

/// Default window half-width n^(-1/5) * (max x - min x).
double default_contact_bandwidth(const Sample& sample);

/// First-stage estimate of the contact set: local averages of y over windows
/// [g - h, g + h] centred at each distinct x, kept where the average is at
/// most C * sqrt(log n / (n h)). Returns the smallest and largest kept x, or
/// the full support when nothing is kept.
ContactBounds estimate_contact_set(const Sample& sample, double bandwidth, double multiplier);

ContactBounds resolve_contact_set(const Sample& sample, const ContactSetSpec& spec);

/// Tests E(Y | X) >= 0. Degenerate cases (no feasible interval, empty contact
/// set, log c_hat <= 1) resolve to non-rejection with the matching flag set.
TestReport run_test(const Sample& sample, const TestConfig& config);

TestReport run_test(const Sample& sample, const TruncationRule& rule, const ContactSetSpec& contact, double alpha,
                    int c_exponent = 2);

/// Vector-valued Y: each coordinate is tested at alpha / K and the null is
/// rejected if any coordinate rejects. K = 1 returns run_test unchanged.
/// Throws MismatchedCovariates if the samples do not share x.
TestReport run_test_bonferroni(const std::vector<Sample>& samples, const TestConfig& config);

}  // namespace cmi

#endif  // CMI_INFERENCE_HPP_
