#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cmi/inference.hpp"
#include "oracles.hpp"

namespace cmi {
namespace {

Sample four_point() { return build_sample({{1, -1}, {2, -1}, {3, 1}, {4, 1}}); }

Sample constant(double value, std::size_t n) {
  std::vector<std::pair<double, double>> raw;
  for (std::size_t i = 0; i < n; ++i) raw.emplace_back(static_cast<double>(i) / n, value);
  return build_sample(raw);
}

TEST(RunTest, NonNegativeOutcomesNeverReject) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> raw;
  for (int i = 0; i < 300; ++i) raw.emplace_back(u(rng), 2.0 * u(rng));
  const auto s = build_sample(raw);
  for (double alpha : {0.01, 0.05, 0.5, 0.99}) {
    const auto r = run_test(s, TruncationRule::schedule(), ContactSetSpec::full_support(), alpha);
    EXPECT_EQ(r.t_n, 0.0);
    EXPECT_EQ(r.statistic, 0.0);
    EXPECT_FALSE(r.reject);
  }
}

TEST(RunTest, FourPointExample) {
  const auto r = run_test(four_point(), TruncationRule::explicit_value(0.1), ContactSetSpec::full_support(), 0.05);
  EXPECT_NEAR(r.c_hat, 100.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.statistic, 2.0);
  ASSERT_TRUE(r.cv);
  // 3.0349 + (1.5 log 4.6052 - log(2 sqrt(pi)) + 2.9702) / 3.0349, mpmath.
  EXPECT_NEAR(*r.cv, 4.351376313403752302, 1e-12);
  EXPECT_FALSE(r.reject);
  ASSERT_TRUE(r.argmin_x);
  EXPECT_EQ(r.argmin_x->first, 1.0);
  EXPECT_EQ(r.argmin_x->second, 2.0);
  EXPECT_EQ(r.contact_lo, 1.0);
  EXPECT_EQ(r.contact_hi, 4.0);
}

TEST(RunTest, StrongViolationRejects) {
  const auto s = constant(-1.0, 100);
  std::vector<double> x(100), y(100, -1.0);
  for (std::size_t i = 0; i < 100; ++i) x[i] = s.x()(i);
  const auto brute = testing::brute_scan(x, y, 0.1);
  // 98 of 100 points: -sqrt(0.98 / 0.02) = -7 is the most negative feasible ratio.
  EXPECT_NEAR(brute.inf_value, -7.0, 1e-12);

  const auto r = run_test(s, TruncationRule::explicit_value(0.1), ContactSetSpec::full_support(), 0.05);
  EXPECT_NEAR(r.statistic, 10.0 * -brute.inf_value, 1e-9);
  ASSERT_TRUE(r.cv);
  EXPECT_TRUE(r.reject);
}

TEST(RunTest, NoFeasibleIntervalFailsSafe) {
  const auto r = run_test(four_point(), TruncationRule::explicit_value(10.0), ContactSetSpec::full_support(), 0.05);
  EXPECT_TRUE(r.flags.no_feasible_interval);
  EXPECT_FALSE(r.reject);
  EXPECT_FALSE(r.argmin_x);
}

TEST(RunTest, ScaleTooSmallFailsSafe) {
  // c_hat = 1 / 0.7^2 ~ 2: log c < 1.
  const auto r = run_test(four_point(), TruncationRule::explicit_value(0.7), ContactSetSpec::full_support(), 0.05);
  EXPECT_TRUE(r.flags.scale_too_small);
  EXPECT_FALSE(r.cv);
  EXPECT_FALSE(r.reject);
}

TEST(RunTest, EmptyContactSetFailsSafe) {
  const auto r =
      run_test(constant(-1.0, 100), TruncationRule::explicit_value(0.1), ContactSetSpec::bounds(5.0, 6.0), 0.05);
  EXPECT_TRUE(r.flags.empty_contact_set);
  EXPECT_TRUE(std::isnan(r.c_hat));
  EXPECT_FALSE(r.reject);
}

TEST(RunTest, InvalidAlphaThrows) {
  EXPECT_THROW(run_test(four_point(), TruncationRule::explicit_value(0.1), ContactSetSpec::full_support(), 1.0),
               Error);
}

TEST(RunTest, ExponentOverride) {
  const auto r = run_test(four_point(), TruncationRule::explicit_value(0.01), ContactSetSpec::full_support(), 0.05, 1);
  EXPECT_NEAR(r.c_hat, 100.0, 1e-12);
}

TEST(RunTest, NestedContactSetsAreOrdered) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> raw;
  for (int i = 0; i < 400; ++i) {
    const double x = u(rng);
    raw.emplace_back(x, (x > 0.3 && x < 0.4 ? -0.4 : 0.0) + (u(rng) < 0.5 ? -1.0 : 1.0));
  }
  const auto s = build_sample(raw);
  double prev_c = 0.0;
  double prev_cv = 0.0;
  bool prev_reject = true;
  for (double half : {0.05, 0.1, 0.2, 0.3, 0.5}) {
    const auto r =
        run_test(s, TruncationRule::schedule(), ContactSetSpec::bounds(0.5 - half, 0.5 + half), 0.05);
    if (!r.cv) continue;
    EXPECT_GE(r.c_hat, prev_c);
    EXPECT_GE(*r.cv, prev_cv);
    EXPECT_TRUE(prev_reject || !r.reject);
    prev_c = r.c_hat;
    prev_cv = *r.cv;
    prev_reject = r.reject;
  }
}

TEST(Bonferroni, SingleCoordinateIsRunTest) {
  const TestConfig config{TruncationRule::explicit_value(0.1), ContactSetSpec::full_support(), 0.05, 2};
  const auto a = run_test(four_point(), config);
  const auto b = run_test_bonferroni({four_point()}, config);
  EXPECT_EQ(a.statistic, b.statistic);
  EXPECT_EQ(a.cv, b.cv);
  EXPECT_EQ(a.reject, b.reject);
  EXPECT_EQ(a.c_hat, b.c_hat);
  EXPECT_EQ(a.alpha, b.alpha);
  EXPECT_TRUE(b.coordinates.empty());
}

TEST(Bonferroni, SplitsLevel) {
  const TestConfig config{TruncationRule::explicit_value(0.1), ContactSetSpec::full_support(), 0.05, 2};
  const auto r = run_test_bonferroni({four_point(), four_point()}, config);
  ASSERT_EQ(r.coordinates.size(), 2u);
  for (const auto& c : r.coordinates) {
    EXPECT_DOUBLE_EQ(c.alpha, 0.025);
    EXPECT_DOUBLE_EQ(c.r, gumbel_r(0.025));
  }
  EXPECT_DOUBLE_EQ(r.alpha, 0.05);
}

TEST(Bonferroni, ViolatingCoordinateDrives) {
  const auto x_source = constant(0.0, 100);
  std::vector<std::pair<double, double>> ok, bad;
  for (std::size_t i = 0; i < 100; ++i) {
    ok.emplace_back(x_source.x()(i), 1.0 + (i % 2 == 0 ? 0.5 : -0.5));
    bad.emplace_back(x_source.x()(i), -1.0);
  }
  const TestConfig config{TruncationRule::explicit_value(0.1), ContactSetSpec::full_support(), 0.05, 2};
  const auto r = run_test_bonferroni({build_sample(ok), build_sample(bad)}, config);
  EXPECT_TRUE(r.reject);
  ASSERT_TRUE(r.driving_coordinate);
  EXPECT_EQ(*r.driving_coordinate, 1u);
  EXPECT_FALSE(r.coordinates[0].reject);
  EXPECT_TRUE(r.coordinates[1].reject);
}

TEST(Bonferroni, MismatchedCovariates) {
  try {
    run_test_bonferroni({four_point(), build_sample({{1, 0}, {2, 0}, {3, 0}, {5, 0}})}, TestConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MismatchedCovariates);
  }
}

TEST(ContactEstimate, AllBinding) {
  const auto s = constant(0.0, 50);
  const auto b = estimate_contact_set(s, 0.1, 2.0);
  EXPECT_FALSE(b.fallback);
  EXPECT_EQ(b.lo, s.x()(0));
  EXPECT_EQ(b.hi, s.x()(49));
}

TEST(ContactEstimate, EmptyFallsBackToSupport) {
  const auto s = constant(10.0, 50);
  const auto b = estimate_contact_set(s, 0.1, 1e-6);
  EXPECT_TRUE(b.fallback);
  EXPECT_EQ(b.lo, s.x()(0));
  EXPECT_EQ(b.hi, s.x()(49));
}

TEST(ContactEstimate, StepFunction) {
  const std::size_t n = 2000;
  const double h = 0.02;
  std::vector<std::pair<double, double>> raw;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / n;
    raw.emplace_back(x, x < 0.5 ? 0.0 : 5.0);
  }
  const auto s = build_sample(raw);
  const auto b = estimate_contact_set(s, h, 2.0);

  // Direct local averages.
  const double threshold = 2.0 * std::sqrt(std::log(double(n)) / (n * h));
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [g, unused] : raw) {
    double sum = 0.0;
    int count = 0;
    for (const auto& [x, y] : raw) {
      if (x >= g - h && x <= g + h) {
        sum += y;
        ++count;
      }
    }
    if (sum / count <= threshold) {
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
  }
  EXPECT_EQ(b.lo, lo);
  EXPECT_EQ(b.hi, hi);
  EXPECT_EQ(b.lo, s.x()(0));
  EXPECT_NEAR(b.hi, 0.5, h + 1.0 / n);
}

TEST(ContactEstimate, RejectsBadParameters) {
  EXPECT_THROW(estimate_contact_set(four_point(), 0.0, 2.0), Error);
  EXPECT_THROW(estimate_contact_set(four_point(), 0.1, -1.0), Error);
}

TEST(ContactEstimate, DefaultBandwidth) {
  const auto s = constant(0.0, 32);
  EXPECT_NEAR(default_contact_bandwidth(s), std::pow(32.0, -0.2) * (31.0 / 32.0), 1e-15);
  const auto r = run_test(four_point(), TruncationRule::explicit_value(0.1), ContactSetSpec::estimated(), 0.05);
  EXPECT_LE(r.contact_lo, r.contact_hi);
}

}  // namespace
}  // namespace cmi
