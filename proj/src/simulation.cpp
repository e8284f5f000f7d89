#include "cmi/simulation.hpp"

#include <boost/math/distributions/beta.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "cmi/critical_values.hpp"
#include "cmi/error.hpp"

namespace cmi {

namespace {

std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void validate(const DgpSpec& spec) {
  if (spec.n < 2) throw Error(ErrorCode::InvalidSpec, "n must be at least 2");
  if (!(spec.x_lo < spec.x_hi) || !std::isfinite(spec.x_lo) || !std::isfinite(spec.x_hi)) {
    throw Error(ErrorCode::InvalidSpec, "X support must be a finite interval with lo < hi");
  }
  if (!(spec.noise.scale > 0.0) || !std::isfinite(spec.noise.scale)) {
    throw Error(ErrorCode::InvalidSpec, "noise scale must be positive and finite");
  }
  if (!spec.mean) throw Error(ErrorCode::InvalidSpec, "mean function is empty");
}

double draw_noise(const NoiseSpec& noise, std::mt19937_64& rng) {
  switch (noise.kind) {
    case NoiseSpec::Kind::Rademacher:
      return std::bernoulli_distribution(0.5)(rng) ? noise.scale : -noise.scale;
    case NoiseSpec::Kind::Uniform:
      return std::uniform_real_distribution<double>(-noise.scale, noise.scale)(rng);
    case NoiseSpec::Kind::TruncatedNormal: {
      std::normal_distribution<double> normal(0.0, 1.0);
      double z = normal(rng);
      while (std::abs(z) > 3.0) z = normal(rng);
      return noise.scale * z;
    }
  }
  return 0.0;
}

}  // namespace

std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

Sample draw_dgp(const DgpSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(spec.x_lo, spec.x_hi);
  VectorX<double> x(static_cast<Eigen::Index>(spec.n));
  VectorX<double> y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x(i) = unif(rng);
    y(i) = spec.mean(x(i)) + draw_noise(spec.noise, rng);
  }
  return build_sample<double>(x, y);
}

BinomialInterval clopper_pearson(std::size_t successes, std::size_t trials, double level) {
  if (trials == 0 || successes > trials || !(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "clopper_pearson needs 0 <= successes <= trials, trials > 0");
  }
  const double tail = (1.0 - level) / 2.0;
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  BinomialInterval out;
  out.lo = successes == 0 ? 0.0 : boost::math::quantile(boost::math::beta_distribution<double>(k, n - k + 1), tail);
  out.hi = successes == trials
               ? 1.0
               : boost::math::quantile(boost::math::beta_distribution<double>(k + 1, n - k), 1.0 - tail);
  return out;
}

double McSummary::standard_error() const {
  if (reps == 0) return 0.0;
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

McSummary mc_rejection_rate(const DgpSpec& spec, const TestConfig& config, std::size_t reps) {
  validate(spec);
  if (reps == 0) throw Error(ErrorCode::InvalidArgument, "reps must be positive");
  // Fail on an invalid level before spending any draws.
  (void)gumbel_r(config.alpha);

  std::vector<char> rejected(reps, 0);
  std::vector<char> flagged(reps, 0);
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(reps); ++i) {
    DgpSpec rep = spec;
    rep.seed = split_seed(spec.seed, static_cast<std::uint64_t>(i));
    const auto report = run_test(draw_dgp(rep), config);
    const auto k = static_cast<std::size_t>(i);
    rejected[k] = report.reject ? 1 : 0;
    flagged[k] = (report.flags.no_feasible_interval || report.flags.scale_too_small ||
                  report.flags.empty_contact_set)
                     ? 1
                     : 0;
  }

  McSummary out;
  out.label = spec.label;
  out.n = spec.n;
  out.reps = reps;
  out.rejections = static_cast<std::size_t>(std::count(rejected.begin(), rejected.end(), 1));
  out.flagged = static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
  out.rate = static_cast<double>(out.rejections) / static_cast<double>(reps);
  out.interval = clopper_pearson(out.rejections, reps);
  return out;
}

McSummary mc_size(const DgpSpec& spec, const TestConfig& config, std::size_t reps) {
  validate(spec);
  constexpr int kGrid = 1000;
  for (int k = 0; k <= kGrid; ++k) {
    const double x = spec.x_lo + (spec.x_hi - spec.x_lo) * k / kGrid;
    if (spec.mean(x) < 0.0) {
      throw Error(ErrorCode::InvalidSpec, "size study needs E(Y | X = x) >= 0; violated at x = " + std::to_string(x));
    }
  }
  return mc_rejection_rate(spec, config, reps);
}

std::vector<McSummary> mc_power(const DgpSpec& null_spec, const std::vector<DgpSpec>& alternatives,
                                const std::vector<std::size_t>& sample_sizes, const TestConfig& config,
                                std::size_t reps) {
  std::vector<McSummary> out;
  out.reserve((alternatives.size() + 1) * sample_sizes.size());
  auto run_all = [&](const DgpSpec& base) {
    for (const std::size_t n : sample_sizes) {
      DgpSpec spec = base;
      spec.n = n;
      out.push_back(mc_rejection_rate(spec, config, reps));
    }
  };
  run_all(null_spec);
  for (const auto& alt : alternatives) run_all(alt);
  return out;
}

GumbelNormalization gumbel_normalization(double horizon) {
  GumbelNormalization out;
  out.scale = std::sqrt(2.0 * std::log(horizon));
  out.location = critical_value(horizon, 0.0);
  return out;
}

double ks_distance(std::span<const double> sorted, const std::function<double(double)>& cdf) {
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double k = static_cast<double>(i);
    d = std::max({d, f - k / n, (k + 1.0) / n - f});
  }
  return d;
}

namespace {

// Branch and bound over pairs of segment-tree nodes (A, B): i ranges over A,
// j over B.
class IncrementScanner {
 public:
  IncrementScanner(const VectorX<double>& path, double step, std::size_t min_steps)
      : path_(path), step_(step), count_(static_cast<std::size_t>(path.size())), min_steps_(min_steps) {
    width_ = 1;
    while (width_ < count_) width_ <<= 1;
    lo_.assign(2 * width_, std::numeric_limits<double>::infinity());
    hi_.assign(2 * width_, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < count_; ++i) {
      lo_[width_ + i] = hi_[width_ + i] = path_(static_cast<Eigen::Index>(i));
    }
    for (std::size_t k = width_ - 1; k >= 1; --k) {
      lo_[k] = std::min(lo_[2 * k], lo_[2 * k + 1]);
      hi_[k] = std::max(hi_[2 * k], hi_[2 * k + 1]);
    }
  }

  double run() {
    if (count_ <= min_steps_) return std::numeric_limits<double>::infinity();
    seed_with_fixed_lengths();
    visit(1, 1, width_);
    return best_;
  }

 private:
  static constexpr std::size_t kLeaf = 16;

  struct Candidate {
    std::size_t a, b;
    double bound;
  };

  double ratio(std::size_t i, std::size_t j) const {
    return (path_(static_cast<Eigen::Index>(j)) - path_(static_cast<Eigen::Index>(i))) /
           std::sqrt(static_cast<double>(j - i) * step_);
  }

  void seed_with_fixed_lengths() {
    for (std::size_t len = min_steps_; len < count_; len *= 2) {
      for (std::size_t i = 0; i + len < count_; ++i) best_ = std::min(best_, ratio(i, i + len));
    }
  }

  std::size_t begin_of(std::size_t node, std::size_t size) const { return (node - level_base(size)) * size; }
  std::size_t level_base(std::size_t size) const { return width_ / size; }

  // Lower bound on the ratio over admissible (i in a, j in b); +inf when none.
  double bound(std::size_t a, std::size_t b, std::size_t size) const {
    const std::size_t a0 = begin_of(a, size);
    const std::size_t b0 = begin_of(b, size);
    if (a0 >= count_ || b0 >= count_) return std::numeric_limits<double>::infinity();
    const std::size_t a1 = std::min(a0 + size, count_) - 1;
    const std::size_t b1 = std::min(b0 + size, count_) - 1;
    if (b1 < a0 + min_steps_) return std::numeric_limits<double>::infinity();
    const std::size_t longest = b1 - a0;
    const std::size_t shortest = b0 > a1 ? std::max(min_steps_, b0 - a1) : min_steps_;
    const double num = lo_[b] - hi_[a];
    return num < 0.0 ? num / std::sqrt(static_cast<double>(shortest) * step_)
                     : num / std::sqrt(static_cast<double>(longest) * step_);
  }

  void visit(std::size_t a, std::size_t b, std::size_t size) {
    if (bound(a, b, size) >= best_) return;
    if (size <= kLeaf) {
      brute_force(a, b, size);
      return;
    }
    const std::size_t half = size / 2;
    std::array<Candidate, 4> kids{{{2 * a, 2 * b, 0.0},
                                   {2 * a, 2 * b + 1, 0.0},
                                   {2 * a + 1, 2 * b, 0.0},
                                   {2 * a + 1, 2 * b + 1, 0.0}}};
    for (auto& k : kids) k.bound = bound(k.a, k.b, half);
    std::sort(kids.begin(), kids.end(), [](const Candidate& l, const Candidate& r) { return l.bound < r.bound; });
    for (const auto& k : kids) {
      if (k.bound >= best_) break;
      visit(k.a, k.b, half);
    }
  }

  void brute_force(std::size_t a, std::size_t b, std::size_t size) {
    const std::size_t a0 = begin_of(a, size);
    const std::size_t b0 = begin_of(b, size);
    const std::size_t a_end = std::min(a0 + size, count_);
    const std::size_t b_end = std::min(b0 + size, count_);
    for (std::size_t i = a0; i < a_end; ++i) {
      for (std::size_t j = std::max(b0, i + min_steps_); j < b_end; ++j) best_ = std::min(best_, ratio(i, j));
    }
  }

  const VectorX<double>& path_;
  double step_;
  std::size_t count_;
  std::size_t min_steps_;
  std::size_t width_ = 1;
  std::vector<double> lo_;
  std::vector<double> hi_;
  double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

double min_standardized_increment(const VectorX<double>& path, double step, std::size_t min_steps) {
  if (!(step > 0.0) || min_steps == 0) {
    throw Error(ErrorCode::InvalidArgument, "step must be positive and min_steps at least 1");
  }
  IncrementScanner scanner(path, step, min_steps);
  return scanner.run();
}

std::size_t unit_steps(double step) { return static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9)); }

VectorX<double> brownian_path(double horizon, double step, std::uint64_t seed) {
  const auto steps = static_cast<Eigen::Index>(std::floor(horizon / step + 1e-9));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(step));
  VectorX<double> path(steps + 1);
  path(0) = 0.0;
  for (Eigen::Index k = 1; k <= steps; ++k) path(k) = path(k - 1) + normal(rng);
  return path;
}

void validate(const LimitSimConfig& config) {
  if (!(config.step > 0.0 && config.step <= 0.5)) {
    throw Error(ErrorCode::InvalidConfig, "grid step must lie in (0, 0.5]");
  }
  if (!std::isfinite(config.horizon) || !(config.horizon >= 1.0 + config.step - 1e-12)) {
    throw Error(ErrorCode::InvalidConfig, "horizon must be at least 1 + step");
  }
  if (config.reps == 0) throw Error(ErrorCode::InvalidConfig, "reps must be positive");
}

LimitSummary simulate_limit_infimum(const LimitSimConfig& config) {
  validate(config);
  LimitSummary out;
  out.config = config;
  out.minima.assign(config.reps, 0.0);
  const std::size_t min_steps = unit_steps(config.step);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(config.reps); ++i) {
    const auto path = brownian_path(config.horizon, config.step, split_seed(config.seed, static_cast<std::uint64_t>(i)));
    out.minima[static_cast<std::size_t>(i)] = -min_standardized_increment(path, config.step, min_steps);
  }

  // The normalization needs log T > 1; shorter horizons report raw minima only.
  if (std::log(config.horizon) > 1.0) {
    const auto norm = gumbel_normalization(config.horizon);
    out.normalized.reserve(out.minima.size());
    for (const double m : out.minima) out.normalized.push_back(norm.scale * (m - norm.location));
    std::sort(out.normalized.begin(), out.normalized.end());
    out.ks_distance = ks_distance(out.normalized, gumbel_cdf);
  } else {
    out.ks_distance = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace cmi
