#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace leiden {

struct BootstrapSettings {
  int samples = 1000;
  double level = 95.0;  // percent
  std::uint64_t seed = 0;

  /// Throws Error("stability") unless samples >= 1 and 0 < level < 100.
  void validate() const;
};

struct StabilityInterval {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int samples = 0;
  double level = 95.0;
  std::uint64_t seed = 0;
  std::size_t undefined_samples = 0;  // resamples on which the statistic was undefined
  bool point_outside = false;         // percentile interval does not contain the point

  double width() const { return upper - lower; }
};

/// Linear-interpolation percentile of sorted values, q in [0, 1]:
/// position h = (m - 1) q between the neighbouring order statistics.
double percentile_linear(std::span<const double> sorted, double q);

/// Seed of the generator used for resample `index`: a splitmix64 mix of
/// (seed, index), so resamples can be drawn in any order or in parallel.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// Fills `out` with out.size() indices drawn uniformly with replacement from
/// [0, n), using the substream for (seed, index).
void draw_resample(std::size_t n, std::uint64_t seed, std::uint64_t index, std::span<std::uint32_t> out);

/// Statistic evaluated on a resample given as indices into the population.
using ResampleStatistic = std::function<std::optional<double>(std::span<const std::uint32_t>)>;

/// Percentile bootstrap over a population of n items: `samples` resamples of
/// size n with replacement; bounds are the (100 - level)/2 and
/// (100 + level)/2 percentiles of the defined resample values. The point
/// estimate is the statistic on the original population. Throws
/// Error("stability") for n = 0, an undefined point estimate or when no
/// resample is defined.
StabilityInterval bootstrap_interval(std::size_t n, const ResampleStatistic& statistic,
                                     const BootstrapSettings& settings);

/// Same construction for several weighted means sharing one set of
/// resamples: column k's statistic is sum(w_i v_ki) / sum(w_i). Matches
/// bootstrap_interval called with the equivalent statistic.
std::vector<StabilityInterval> bootstrap_weighted_means(std::span<const double> weights,
                                                        std::span<const std::vector<double>> columns,
                                                        const BootstrapSettings& settings);

}  // namespace leiden
