#ifndef CMI_SIMULATION_HPP_
#define CMI_SIMULATION_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cmi/inference.hpp"
#include "cmi/sample.hpp"

namespace cmi {

/// Bounded noise laws for Y - E(Y | X).
struct NoiseSpec {
  enum class Kind { Rademacher, Uniform, TruncatedNormal };

  Kind kind = Kind::Rademacher;
  double scale = 1.0;  ///< +-scale coin, U[-scale, scale], or N(0, scale^2) truncated at +-3 scale
};

/// X ~ U[x_lo, x_hi], Y = mean(X) + noise.
struct DgpSpec {
  std::string label = "dgp";
  double x_lo = 0.0;
  double x_hi = 1.0;
  std::function<double(double)> mean = [](double) { return 0.0; };
  NoiseSpec noise;
  std::size_t n = 500;
  std::uint64_t seed = 0;
};

/// Per-replication seed: splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15)).
/// Replication i always sees the same stream, whatever the execution order.
std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept;

Sample draw_dgp(const DgpSpec& spec);

struct BinomialInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
BinomialInterval clopper_pearson(std::size_t successes, std::size_t trials, double level = 0.95);

struct McSummary {
  std::string label;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::size_t rejections = 0;
  std::size_t flagged = 0;  ///< replications ending in a degenerate-case flag
  double rate = 0.0;
  BinomialInterval interval;

  double standard_error() const;
};

/// Rejection frequency of run_test over `reps` independent draws of `spec`,
/// replication i drawn with split_seed(spec.seed, i). No sign check on the mean.
McSummary mc_rejection_rate(const DgpSpec& spec, const TestConfig& config, std::size_t reps);

/// Size study. Throws InvalidSpec when the mean function is negative anywhere
/// on a 1001-point grid of the support.
McSummary mc_size(const DgpSpec& spec, const TestConfig& config, std::size_t reps);

/// Rejection rates for the null and each alternative at each sample size.
/// Each cell reuses the spec's seed, so cells differ only through (mean, n).
std::vector<McSummary> mc_power(const DgpSpec& null_spec, const std::vector<DgpSpec>& alternatives,
                                const std::vector<std::size_t>& sample_sizes, const TestConfig& config,
                                std::size_t reps);

struct LimitSimConfig {
  double horizon = 1e4;
  double step = 0.1;
  std::size_t reps = 2000;
  std::uint64_t seed = 0;
};

struct GumbelNormalization {
  double scale = 0.0;     ///< a_T = (2 log T)^(1/2)
  double location = 0.0;  ///< b_T, the critical value at r = 0
};

GumbelNormalization gumbel_normalization(double horizon);

struct LimitSummary {
  LimitSimConfig config;
  std::vector<double> minima;      ///< M = -min (B(s+t) - B(s)) / sqrt(t), per replication
  std::vector<double> normalized;  ///< a_T (M - b_T), sorted ascending
  double ks_distance = 0.0;        ///< sup |F_R - exp(-exp(-g))|
};

/// Kolmogorov distance between the empirical CDF of `sorted` and `cdf`.
double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// min over 0 <= i < j < path.size(), j - i >= min_steps of
/// (path[j] - path[i]) / sqrt((j - i) * step).
///
/// Exact. Uses branch and bound over a min/max segment tree: a block of
/// start points A and a block of end points B are discarded once
/// (min_B - max_A) / sqrt(shortest admissible span) cannot beat the current
/// best.
double min_standardized_increment(const VectorX<double>& path, double step, std::size_t min_steps);

/// Discrete Brownian path B(0) = 0, B(k step) for k = 0..floor(horizon / step).
VectorX<double> brownian_path(double horizon, double step, std::uint64_t seed);

/// Smallest number of grid steps spanning at least unit time.
std::size_t unit_steps(double step);

void validate(const LimitSimConfig& config);

/// Monte Carlo check of the Gumbel limit of the normalized Brownian
/// increment extreme.
LimitSummary simulate_limit_infimum(const LimitSimConfig& config);

}  // namespace cmi

#endif  // CMI_SIMULATION_HPP_
