#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cmi/sample.hpp"
#include "oracles.hpp"

namespace cmi {
namespace {

TEST(BuildSample, SortsTwoPoints) {
  const auto s = build_sample({{2.0, 5.0}, {1.0, 3.0}});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.x()(0), 1.0);
  EXPECT_EQ(s.x()(1), 2.0);
  EXPECT_EQ(s.y()(0), 3.0);
  EXPECT_EQ(s.y()(1), 5.0);
  ASSERT_EQ(s.p1().size(), 3);
  EXPECT_EQ(s.p1()(0), 0.0);
  EXPECT_EQ(s.p1()(1), 3.0);
  EXPECT_EQ(s.p1()(2), 8.0);
  EXPECT_EQ(s.p2()(2), 34.0);
}

TEST(BuildSample, GroupsTiedCovariates) {
  const auto s = build_sample({{1.0, 1.0}, {1.0, 2.0}, {3.0, 0.0}});
  const auto groups = s.tie_groups();
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0], (IndexRange{0, 2}));
  EXPECT_EQ(groups[1], (IndexRange{2, 3}));
  EXPECT_EQ(s.group_x(1), 3.0);
}

TEST(BuildSample, StableWithinTies) {
  const auto s = build_sample({{2.0, 7.0}, {1.0, 1.0}, {2.0, 8.0}, {1.0, 2.0}});
  EXPECT_EQ(s.y()(0), 1.0);
  EXPECT_EQ(s.y()(1), 2.0);
  EXPECT_EQ(s.y()(2), 7.0);
  EXPECT_EQ(s.y()(3), 8.0);
}

TEST(BuildSample, RejectsNonFinite) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    build_sample({{1.0, nan}});
    FAIL() << "expected NonFiniteInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteInput);
  }
  try {
    build_sample({{1.0, 2.0}, {std::numeric_limits<double>::infinity(), 0.0}});
    FAIL() << "expected NonFiniteInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteInput);
  }
}

TEST(BuildSample, RejectsTooFew) {
  try {
    build_sample({{1.0, 2.0}});
    FAIL() << "expected TooFewObservations";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewObservations);
  }
}

TEST(BuildSample, InvariantsOnRandomData) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = testing::random_dataset(rng);
    const auto s = build_sample(testing::pairs(d));
    const auto n = s.size();

    for (std::size_t i = 1; i < n; ++i) EXPECT_LE(s.x()(i - 1), s.x()(i));

    const auto offsets = s.group_offsets();
    EXPECT_EQ(offsets.front(), 0u);
    EXPECT_EQ(offsets.back(), n);
    for (std::size_t g = 0; g < s.group_count(); ++g) {
      const auto r = s.group(g);
      ASSERT_LT(r.begin, r.end);
      for (std::size_t i = r.begin; i < r.end; ++i) EXPECT_EQ(s.x()(i), s.group_x(g));
      if (g > 0) EXPECT_LT(s.group_x(g - 1), s.group_x(g));
    }

    double total = 0.0;
    double max_abs = 0.0;
    for (double v : d.y) {
      total += v;
      max_abs = std::max(max_abs, std::abs(v));
    }
    EXPECT_NEAR(s.p1()(static_cast<Eigen::Index>(n)), total, 1e-12 * n * std::max(max_abs, 1.0));
  }
}

TEST(BuildSample, FloatScalar) {
  Eigen::VectorXf x(3), y(3);
  x << 3.f, 1.f, 2.f;
  y << 0.5f, -1.f, 2.f;
  const auto s = build_sample<float>(x, y);
  EXPECT_FLOAT_EQ(s.p1()(3), 1.5f);
  EXPECT_EQ(s.group_count(), 3u);
}

}  // namespace
}  // namespace cmi
