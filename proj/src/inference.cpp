#include "cmi/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmi/error.hpp"

namespace cmi {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double x_min(const Sample& s) { return s.x()(0); }
double x_max(const Sample& s) { return s.x()(s.x().size() - 1); }

}  // namespace

double default_contact_bandwidth(const Sample& sample) {
  const double n = static_cast<double>(sample.size());
  return std::pow(n, -0.2) * (x_max(sample) - x_min(sample));
}

ContactBounds estimate_contact_set(const Sample& sample, double bandwidth, double multiplier) {
  if (!(bandwidth > 0.0) || !(multiplier > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "contact-set estimation needs bandwidth > 0 and multiplier > 0");
  }
  const auto& x = sample.x();
  const double* first = x.data();
  const double* last = x.data() + x.size();
  const double n = static_cast<double>(sample.size());
  const double threshold = multiplier * std::sqrt(std::log(n) / (n * bandwidth));

  ContactBounds out{0.0, 0.0, true};
  bool any = false;
  for (std::size_t g = 0; g < sample.group_count(); ++g) {
    const double centre = sample.group_x(g);
    const auto b = std::lower_bound(first, last, centre - bandwidth) - first;
    const auto e = std::upper_bound(first, last, centre + bandwidth) - first;
    const double local_mean = (sample.p1()(e) - sample.p1()(b)) / static_cast<double>(e - b);
    if (local_mean <= threshold) {
      if (!any) out.lo = centre;
      out.hi = centre;
      any = true;
    }
  }
  if (!any) return {x_min(sample), x_max(sample), true};
  out.fallback = false;
  return out;
}

ContactBounds resolve_contact_set(const Sample& sample, const ContactSetSpec& spec) {
  switch (spec.mode) {
    case ContactSetSpec::Mode::FullSupport:
      return {x_min(sample), x_max(sample), false};
    case ContactSetSpec::Mode::Explicit:
      if (!(spec.lo <= spec.hi)) {
        throw Error(ErrorCode::InvalidArgument, "explicit contact set requires lo <= hi");
      }
      return {spec.lo, spec.hi, false};
    case ContactSetSpec::Mode::Estimated: {
      const double h = spec.bandwidth > 0.0 ? spec.bandwidth : default_contact_bandwidth(sample);
      // All x equal: the support is a single point.
      if (!(h > 0.0)) return {x_min(sample), x_max(sample), true};
      return estimate_contact_set(sample, h, spec.multiplier);
    }
  }
  return {x_min(sample), x_max(sample), false};
}

TestReport run_test(const Sample& sample, const TestConfig& config) {
  TestReport report;
  report.config = config;
  report.n = sample.size();
  report.alpha = config.alpha;
  report.r = gumbel_r(config.alpha);
  report.sigma_min = realize_truncation(config.truncation, sample);
  report.first_order = first_order_critical_value(report.sigma_min);

  const auto scan = scan_statistic(sample, report.sigma_min);
  report.inf_value = scan.inf_value;
  report.t_n = scan.t_n;
  report.statistic = std::sqrt(static_cast<double>(report.n)) * scan.t_n;
  report.feasible_count = scan.feasible_count;
  report.flags.no_feasible_interval = scan.no_feasible_interval();
  if (scan.argmin) {
    report.argmin_groups = scan.argmin;
    report.argmin_x = std::make_pair(sample.group_x(scan.argmin->lo), sample.group_x(scan.argmin->hi - 1));
  }

  const auto contact = resolve_contact_set(sample, config.contact);
  report.contact_lo = contact.lo;
  report.contact_hi = contact.hi;
  report.c_hat = kNaN;
  try {
    report.c_hat = c_hat(sample, contact.lo, contact.hi, report.sigma_min, config.c_exponent);
    report.cv = critical_value(report.c_hat, report.r);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::EmptyContactSet) {
      report.flags.empty_contact_set = true;
    } else if (e.code() == ErrorCode::ScaleTooSmall) {
      report.flags.scale_too_small = true;
    } else {
      throw;
    }
  }

  report.reject = report.cv.has_value() && !report.flags.no_feasible_interval && report.statistic > *report.cv;
  return report;
}

TestReport run_test(const Sample& sample, const TruncationRule& rule, const ContactSetSpec& contact, double alpha,
                    int c_exponent) {
  return run_test(sample, TestConfig{rule, contact, alpha, c_exponent});
}

TestReport run_test_bonferroni(const std::vector<Sample>& samples, const TestConfig& config) {
  if (samples.empty()) {
    throw Error(ErrorCode::InvalidArgument, "Bonferroni test needs at least one coordinate");
  }
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (samples[k].x() != samples[0].x()) {
      throw Error(ErrorCode::MismatchedCovariates, "coordinate " + std::to_string(k) + " has a different x");
    }
  }
  if (samples.size() == 1) return run_test(samples.front(), config);

  TestConfig per_coordinate = config;
  per_coordinate.alpha = config.alpha / static_cast<double>(samples.size());

  std::vector<TestReport> coordinates(samples.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(samples.size()); ++k) {
    coordinates[static_cast<std::size_t>(k)] = run_test(samples[static_cast<std::size_t>(k)], per_coordinate);
  }

  // The driving coordinate has the largest margin statistic - cv; coordinates
  // without a usable cv only drive when no coordinate has one.
  std::size_t driver = 0;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < coordinates.size(); ++k) {
    if (!coordinates[k].cv) continue;
    const double margin = coordinates[k].statistic - *coordinates[k].cv;
    if (margin > best_margin) {
      best_margin = margin;
      driver = k;
    }
  }

  TestReport report = coordinates[driver];
  report.config = config;
  report.alpha = config.alpha;
  report.reject = std::any_of(coordinates.begin(), coordinates.end(), [](const TestReport& c) { return c.reject; });
  report.driving_coordinate = driver;
  report.coordinates = std::move(coordinates);
  return report;
}

}  // namespace cmi
