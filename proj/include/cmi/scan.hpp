#ifndef CMI_SCAN_HPP_
#define CMI_SCAN_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmi/error.hpp"
#include "cmi/sample.hpp"

namespace cmi {

template <typename Scalar>
struct IntervalMoments {
  Scalar mean = 0;  ///< E_n[Y 1{s < X < s + t}]
  Scalar sd = 0;    ///< sqrt(E_n[Y^2 1{...}] - mean^2), clamped at 0
  std::size_t count = 0;
};

/// Tie-group range [lo, hi).
struct GroupRange {
  std::size_t lo = 0;
  std::size_t hi = 0;

  friend bool operator==(const GroupRange&, const GroupRange&) = default;
  friend auto operator<=>(const GroupRange&, const GroupRange&) = default;
};

template <typename Scalar>
struct ScanResult {
  /// Infimum of mean / sd over ranges with sd >= sigma_min; +inf if none.
  Scalar inf_value = std::numeric_limits<Scalar>::infinity();
  /// Negative part of inf_value, max(-inf_value, 0).
  Scalar t_n = 0;
  std::optional<GroupRange> argmin;
  std::size_t feasible_count = 0;

  bool no_feasible_interval() const noexcept { return feasible_count == 0; }
};

/// Moments of an interval from its raw sums. Shared by the fast scan and the
/// oracle so the two differ only in how the sums are accumulated.
template <typename Scalar>
inline IntervalMoments<Scalar> moments_from_sums(Scalar sum_y, Scalar sum_y2, Scalar n, std::size_t count) {
  if (count == 0) return {};
  const Scalar mean = sum_y / n;
  const Scalar second = sum_y2 / n;
  const Scalar var = std::max(Scalar(0), second - mean * mean);
  return {mean, std::sqrt(var), count};
}

template <typename Scalar>
IntervalMoments<Scalar> interval_moments(const BasicSample<Scalar>& sample, std::size_t lo, std::size_t hi) {
  if (lo > hi || hi > sample.group_count()) {
    throw Error(ErrorCode::IndexOutOfRange, "group range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                                ") outside [0, " + std::to_string(sample.group_count()) + "]");
  }
  const auto obs = sample.observations(lo, hi);
  const auto b = static_cast<Eigen::Index>(obs.begin);
  const auto e = static_cast<Eigen::Index>(obs.end);
  return moments_from_sums<Scalar>(sample.p1()(e) - sample.p1()(b), sample.p2()(e) - sample.p2()(b),
                                   static_cast<Scalar>(sample.size()), obs.size());
}

namespace detail {

/// Ratios closer than this (relative) to the infimum count as ties. Distinct
/// ranges can share the same exact ratio, e.g. any two single negative
/// observations, and the two summation paths may round them differently.
template <typename Scalar>
constexpr Scalar tie_tolerance() {
  return Scalar(1e4) * std::numeric_limits<Scalar>::epsilon();
}

template <typename Scalar>
bool within_tie(Scalar ratio, Scalar best) {
  return ratio <= best + tie_tolerance<Scalar>() * std::max(Scalar(1), std::abs(best));
}

template <typename Scalar>
ScanResult<Scalar> finish(Scalar best, std::optional<GroupRange> where, std::size_t feasible) {
  ScanResult<Scalar> out;
  out.feasible_count = feasible;
  if (where) {
    out.inf_value = best;
    out.t_n = std::max(Scalar(0), -best);
    out.argmin = where;
  }
  return out;
}

template <typename Scalar>
void check_sigma_min(Scalar sigma_min) {
  if (!(sigma_min > 0) || !std::isfinite(sigma_min)) {
    throw Error(ErrorCode::InvalidArgument, "sigma_min must be positive and finite");
  }
}

}  // namespace detail

/*
 * Variance-weighted scan statistic
 *
 *   inf { E_n[Y 1{s<X<s+t}] / sd(s,t) : sd(s,t) >= sigma_min }
 *
 * evaluated exactly over every contiguous tie-group range of the sorted
 * sample, which realizes every distinct value the continuum of (s, t) can
 * produce. O(G^2) in the number of tie groups. The first pass finds the
 * infimum; the second reports the lexicographically smallest (lo, hi) whose
 * ratio ties with it, so the argmin depends neither on the thread count nor
 * on last-bit rounding.
 */
template <typename Scalar>
ScanResult<Scalar> scan_statistic(const BasicSample<Scalar>& sample, Scalar sigma_min) {
  detail::check_sigma_min(sigma_min);
  const std::size_t groups = sample.group_count();
  const auto offsets = sample.group_offsets();
  const auto& p1 = sample.p1();
  const auto& p2 = sample.p2();
  const auto n = static_cast<Scalar>(sample.size());
  const auto groups_s = static_cast<std::ptrdiff_t>(groups);

  auto ratio = [&](std::size_t lo, std::size_t hi, Scalar& out) {
    const auto b = static_cast<Eigen::Index>(offsets[lo]);
    const auto e = static_cast<Eigen::Index>(offsets[hi]);
    const auto m = moments_from_sums<Scalar>(p1(e) - p1(b), p2(e) - p2(b), n, offsets[hi] - offsets[lo]);
    if (!(m.sd >= sigma_min)) return false;
    out = m.mean / m.sd;
    return true;
  };

  Scalar best = std::numeric_limits<Scalar>::infinity();
  std::size_t feasible = 0;
#pragma omp parallel for schedule(dynamic, 16) reduction(min : best) reduction(+ : feasible)
  for (std::ptrdiff_t lo_s = 0; lo_s < groups_s; ++lo_s) {
    const auto lo = static_cast<std::size_t>(lo_s);
    for (std::size_t hi = lo + 1; hi <= groups; ++hi) {
      Scalar r;
      if (ratio(lo, hi, r)) {
        ++feasible;
        best = std::min(best, r);
      }
    }
  }
  if (feasible == 0) return detail::finish<Scalar>(best, std::nullopt, 0);

  std::ptrdiff_t first_lo = groups_s;
#pragma omp parallel for schedule(dynamic, 16) reduction(min : first_lo)
  for (std::ptrdiff_t lo_s = 0; lo_s < groups_s; ++lo_s) {
    const auto lo = static_cast<std::size_t>(lo_s);
    for (std::size_t hi = lo + 1; hi <= groups; ++hi) {
      Scalar r;
      if (ratio(lo, hi, r) && detail::within_tie(r, best)) {
        first_lo = std::min(first_lo, lo_s);
        break;
      }
    }
  }
  const auto lo = static_cast<std::size_t>(first_lo);
  for (std::size_t hi = lo + 1; hi <= groups; ++hi) {
    Scalar r;
    if (ratio(lo, hi, r) && detail::within_tie(r, best)) return detail::finish<Scalar>(best, GroupRange{lo, hi}, feasible);
  }
  return detail::finish<Scalar>(best, std::nullopt, feasible);  // unreachable
}

/// Brute-force reference for scan_statistic: every range is re-summed from
/// the raw observations, without prefix sums.
template <typename Scalar>
ScanResult<Scalar> scan_statistic_oracle(const BasicSample<Scalar>& sample, Scalar sigma_min) {
  detail::check_sigma_min(sigma_min);
  const std::size_t groups = sample.group_count();
  const auto offsets = sample.group_offsets();
  const auto& y = sample.y();
  const auto n = static_cast<Scalar>(sample.size());

  std::vector<std::pair<GroupRange, Scalar>> feasible;
  for (std::size_t lo = 0; lo < groups; ++lo) {
    for (std::size_t hi = lo + 1; hi <= groups; ++hi) {
      Scalar s1 = 0;
      Scalar s2 = 0;
      for (std::size_t i = offsets[lo]; i < offsets[hi]; ++i) {
        const Scalar v = y(static_cast<Eigen::Index>(i));
        s1 += v;
        s2 += v * v;
      }
      const auto m = moments_from_sums<Scalar>(s1, s2, n, offsets[hi] - offsets[lo]);
      if (m.sd >= sigma_min) feasible.emplace_back(GroupRange{lo, hi}, m.mean / m.sd);
    }
  }
  if (feasible.empty()) return detail::finish<Scalar>(std::numeric_limits<Scalar>::infinity(), std::nullopt, 0);
  Scalar best = feasible.front().second;
  for (const auto& f : feasible) best = std::min(best, f.second);
  for (const auto& [range, r] : feasible) {
    if (detail::within_tie(r, best)) return detail::finish<Scalar>(best, range, feasible.size());
  }
  return detail::finish<Scalar>(best, std::nullopt, feasible.size());  // unreachable
}

}  // namespace cmi

#endif  // CMI_SCAN_HPP_
