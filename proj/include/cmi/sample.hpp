#ifndef CMI_SAMPLE_HPP_
#define CMI_SAMPLE_HPP_

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "cmi/error.hpp"

namespace cmi {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Half-open range of observation indices [begin, end).
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/*
 * Observations (x_i, y_i) sorted by x, together with the prefix sums of y and
 * y^2 that turn every interval moment into an O(1) lookup.
 *
 * Observations sharing an x value form a tie group: no open interval
 * (s, s + t) can contain some of them without containing all of them, so
 * interval queries are expressed in tie-group indices.
 */
template <typename Scalar>
class BasicSample {
 public:
  using Vector = VectorX<Scalar>;

  BasicSample() = default;

  std::size_t size() const noexcept { return static_cast<std::size_t>(x_.size()); }
  std::size_t group_count() const noexcept { return group_offsets_.empty() ? 0 : group_offsets_.size() - 1; }

  const Vector& x() const noexcept { return x_; }
  const Vector& y() const noexcept { return y_; }
  /// p1[k] = y_0 + ... + y_{k-1}, p1[0] = 0.
  const Vector& p1() const noexcept { return p1_; }
  /// Same as p1 for y^2.
  const Vector& p2() const noexcept { return p2_; }

  /// Offsets o_0 = 0 < o_1 < ... < o_G = n; group g is [o_g, o_{g+1}).
  std::span<const std::size_t> group_offsets() const noexcept { return group_offsets_; }

  IndexRange group(std::size_t g) const { return {group_offsets_.at(g), group_offsets_.at(g + 1)}; }

  std::vector<IndexRange> tie_groups() const {
    std::vector<IndexRange> out;
    out.reserve(group_count());
    for (std::size_t g = 0; g < group_count(); ++g) out.push_back(group(g));
    return out;
  }

  /// Covariate value shared by every member of group g.
  Scalar group_x(std::size_t g) const { return x_(static_cast<Eigen::Index>(group_offsets_.at(g))); }

  /// Observation range spanned by tie groups [lo, hi).
  IndexRange observations(std::size_t lo, std::size_t hi) const {
    return {group_offsets_[lo], group_offsets_[hi]};
  }

  template <typename S>
  friend BasicSample<S> build_sample(std::span<const std::pair<S, S>> raw_pairs);
  template <typename S>
  friend BasicSample<S> build_sample(const VectorX<S>& x, const VectorX<S>& y);

 private:
  void finalize();

  Vector x_;
  Vector y_;
  Vector p1_;
  Vector p2_;
  std::vector<std::size_t> group_offsets_;
};

using Sample = BasicSample<double>;

template <typename Scalar>
void BasicSample<Scalar>::finalize() {
  const Eigen::Index n = x_.size();
  p1_.setZero(n + 1);
  p2_.setZero(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    p1_(i + 1) = p1_(i) + y_(i);
    p2_(i + 1) = p2_(i) + y_(i) * y_(i);
  }
  group_offsets_.clear();
  group_offsets_.push_back(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    if (x_(i) != x_(i - 1)) group_offsets_.push_back(static_cast<std::size_t>(i));
  }
  group_offsets_.push_back(static_cast<std::size_t>(n));
}

/// Stable-sorts the pairs by x and precomputes prefix sums and tie groups.
template <typename Scalar>
BasicSample<Scalar> build_sample(const VectorX<Scalar>& x, const VectorX<Scalar>& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::InvalidArgument, "x and y have different lengths");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::TooFewObservations, "need at least 2 observations, got " + std::to_string(x.size()));
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw Error(ErrorCode::NonFiniteInput, "observations must be finite");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(x.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return x(a) < x(b); });

  BasicSample<Scalar> s;
  s.x_.resize(x.size());
  s.y_.resize(y.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    s.x_(i) = x(order[k]);
    s.y_(i) = y(order[k]);
  }
  s.finalize();
  return s;
}

template <typename Scalar>
BasicSample<Scalar> build_sample(std::span<const std::pair<Scalar, Scalar>> raw_pairs) {
  // Check the count and finiteness first so the error reflects the raw input.
  if (raw_pairs.size() < 2) {
    for (const auto& [a, b] : raw_pairs) {
      if (!std::isfinite(a) || !std::isfinite(b)) {
        throw Error(ErrorCode::NonFiniteInput, "observations must be finite");
      }
    }
    throw Error(ErrorCode::TooFewObservations,
                "need at least 2 observations, got " + std::to_string(raw_pairs.size()));
  }
  VectorX<Scalar> x(static_cast<Eigen::Index>(raw_pairs.size()));
  VectorX<Scalar> y(x.size());
  for (std::size_t k = 0; k < raw_pairs.size(); ++k) {
    x(static_cast<Eigen::Index>(k)) = raw_pairs[k].first;
    y(static_cast<Eigen::Index>(k)) = raw_pairs[k].second;
  }
  return build_sample<Scalar>(x, y);
}

inline Sample build_sample(const std::vector<std::pair<double, double>>& raw_pairs) {
  return build_sample<double>(std::span<const std::pair<double, double>>(raw_pairs));
}

/// Population standard deviation of y (divides by n).
template <typename Scalar>
Scalar outcome_sd(const BasicSample<Scalar>& sample) {
  const Scalar n = static_cast<Scalar>(sample.size());
  const Scalar mean = sample.y().sum() / n;
  const Scalar var = (sample.y().array() - mean).square().sum() / n;
  return std::sqrt(var);
}

}  // namespace cmi

#endif  // CMI_SAMPLE_HPP_
