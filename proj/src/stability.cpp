#include "leiden/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "leiden/error.hpp"
#include "leiden/parallel.hpp"

namespace leiden {

void BootstrapSettings::validate() const {
  if (samples < 1) throw Error("stability", "bootstrap needs at least one sample");
  if (!(level > 0.0 && level < 100.0)) throw Error("stability", "level must lie in (0, 100)");
}

double percentile_linear(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error("stability", "percentile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (index * 0xd1b54a32d192ed03ULL));
}

void draw_resample(std::size_t n, std::uint64_t seed, std::uint64_t index, std::span<std::uint32_t> out) {
  std::mt19937_64 gen(substream_seed(seed, index));
  const std::uint64_t bound = n;
  // Rejection keeps the draw unbiased and identical across standard libraries.
  const std::uint64_t reject_below = (0 - bound) % bound;
  for (auto& slot : out) {
    std::uint64_t x = gen();
    while (x < reject_below) x = gen();
    slot = static_cast<std::uint32_t>(x % bound);
  }
}

namespace {

StabilityInterval summarize(double point, std::vector<std::optional<double>>& values,
                            const BootstrapSettings& s) {
  std::vector<double> defined;
  defined.reserve(values.size());
  for (const auto& v : values)
    if (v) defined.push_back(*v);
  if (defined.empty()) throw Error("stability", "statistic undefined on every resample");
  std::sort(defined.begin(), defined.end());
  StabilityInterval iv;
  iv.point = point;
  iv.samples = s.samples;
  iv.level = s.level;
  iv.seed = s.seed;
  iv.undefined_samples = values.size() - defined.size();
  iv.lower = percentile_linear(defined, (100.0 - s.level) / 200.0);
  iv.upper = percentile_linear(defined, (100.0 + s.level) / 200.0);
  iv.point_outside = point < iv.lower || point > iv.upper;
  return iv;
}

}  // namespace

StabilityInterval bootstrap_interval(std::size_t n, const ResampleStatistic& statistic,
                                     const BootstrapSettings& settings) {
  settings.validate();
  if (n == 0) throw Error("stability", "bootstrap over an empty population");
  std::vector<std::uint32_t> identity(n);
  std::iota(identity.begin(), identity.end(), 0u);
  const auto point = statistic(identity);
  if (!point) throw Error("stability", "statistic undefined on the full population");

  std::vector<std::optional<double>> values(static_cast<std::size_t>(settings.samples));
  parallel_chunks(values.size(), [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> idx(n);
    for (std::size_t r = begin; r < end; ++r) {
      draw_resample(n, settings.seed, r, idx);
      values[r] = statistic(idx);
    }
  });
  return summarize(*point, values, settings);
}

std::vector<StabilityInterval> bootstrap_weighted_means(std::span<const double> weights,
                                                        std::span<const std::vector<double>> columns,
                                                        const BootstrapSettings& settings) {
  settings.validate();
  const std::size_t n = weights.size();
  if (n == 0) throw Error("stability", "bootstrap over an empty population");
  for (const auto& c : columns)
    if (c.size() != n) throw Error("stability", "column length differs from weight count");

  const std::size_t k = columns.size();
  const auto samples = static_cast<std::size_t>(settings.samples);
  std::vector<std::vector<std::optional<double>>> values(k, std::vector<std::optional<double>>(samples));
  parallel_chunks(samples, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<std::uint32_t> idx(n);
    std::vector<double> sums(k);
    for (std::size_t r = begin; r < end; ++r) {
      draw_resample(n, settings.seed, r, idx);
      double total = 0.0;
      std::fill(sums.begin(), sums.end(), 0.0);
      for (const std::uint32_t i : idx) {
        const double w = weights[i];
        total += w;
        for (std::size_t c = 0; c < k; ++c) sums[c] += w * columns[c][i];
      }
      if (total <= 0.0) continue;
      for (std::size_t c = 0; c < k; ++c) values[c][r] = sums[c] / total;
    }
  });

  double total = 0.0;
  std::vector<double> point(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    total += weights[i];
    for (std::size_t c = 0; c < k; ++c) point[c] += weights[i] * columns[c][i];
  }
  if (total <= 0.0) throw Error("stability", "statistic undefined on the full population");
  std::vector<StabilityInterval> out;
  out.reserve(k);
  for (std::size_t c = 0; c < k; ++c) out.push_back(summarize(point[c] / total, values[c], settings));
  return out;
}

}  // namespace leiden
