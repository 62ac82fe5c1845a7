#include <doctest.h>

#include <random>

#include "leiden/error.hpp"
#include "leiden/stability.hpp"

using namespace leiden;

namespace {

ResampleStatistic mean_of(const std::vector<double>& v) {
  return [&v](std::span<const std::uint32_t> idx) -> std::optional<double> {
    double s = 0.0;
    for (const auto i : idx) s += v[i];
    return s / static_cast<double>(idx.size());
  };
}

}  // namespace

TEST_SUITE("stability") {
  TEST_CASE("linear percentiles") {
    const std::vector<double> v{1, 2, 3, 4, 5};
    CHECK(percentile_linear(v, 0.0) == 1.0);
    CHECK(percentile_linear(v, 1.0) == 5.0);
    CHECK(percentile_linear(v, 0.5) == 3.0);
    CHECK(percentile_linear(v, 0.1) == doctest::Approx(1.4));
    CHECK(percentile_linear(std::vector<double>{7.0}, 0.3) == 7.0);
  }

  TEST_CASE("identical publications collapse the interval") {
    const std::vector<double> v(50, 1.7);
    const auto iv = bootstrap_interval(v.size(), mean_of(v), {});
    CHECK(iv.lower == iv.point);
    CHECK(iv.upper == iv.point);
    CHECK(iv.samples == 1000);
  }

  TEST_CASE("n = 1 collapses to the single value") {
    const std::vector<double> v{3.25};
    const auto iv = bootstrap_interval(1, mean_of(v), {100, 95.0, 3});
    CHECK(iv.lower == 3.25);
    CHECK(iv.upper == 3.25);
  }

  TEST_CASE("resample draws are deterministic and in range") {
    std::vector<std::uint32_t> a(100), b(100);
    draw_resample(37, 5, 11, a);
    draw_resample(37, 5, 11, b);
    CHECK(a == b);
    for (const auto x : a) CHECK(x < 37);
    draw_resample(37, 5, 12, b);
    CHECK(a != b);
    CHECK(substream_seed(1, 2) != substream_seed(2, 1));
  }

  TEST_CASE("undefined resamples are counted and excluded") {
    const std::vector<double> v{0.0, 1.0, 0.0, 0.0};
    const ResampleStatistic ratio = [&](std::span<const std::uint32_t> idx) -> std::optional<double> {
      double s = 0.0;
      for (const auto i : idx) s += v[i];
      if (s == 0.0) return std::nullopt;
      return 1.0 / s;
    };
    const auto iv = bootstrap_interval(v.size(), ratio, {500, 95.0, 9});
    CHECK(iv.undefined_samples > 0);
    CHECK(iv.undefined_samples < 500);
    CHECK(iv.lower <= iv.upper);
  }

  TEST_CASE("degenerate inputs are errors") {
    const std::vector<double> v{1.0};
    CHECK_THROWS_AS(bootstrap_interval(0, mean_of(v), {}), Error);
    const ResampleStatistic never = [](std::span<const std::uint32_t>) -> std::optional<double> { return {}; };
    CHECK_THROWS_AS(bootstrap_interval(1, never, {}), Error);
    CHECK_THROWS_AS(BootstrapSettings({0, 95.0, 0}).validate(), Error);
    CHECK_THROWS_AS(BootstrapSettings({10, 100.0, 0}).validate(), Error);
  }

  TEST_CASE("weighted means match the generic bootstrap") {
    std::mt19937_64 g(4);
    std::vector<double> w(80), x(80);
    for (std::size_t i = 0; i < 80; ++i) {
      w[i] = i % 4 == 0 ? 0.25 : 1.0;
      x[i] = std::uniform_real_distribution<double>(0, 3)(g);
    }
    const ResampleStatistic wm = [&](std::span<const std::uint32_t> idx) -> std::optional<double> {
      double ws = 0.0, s = 0.0;
      for (const auto i : idx) {
        ws += w[i];
        s += w[i] * x[i];
      }
      return s / ws;
    };
    const BootstrapSettings bs{400, 90.0, 21};
    const auto a = bootstrap_interval(80, wm, bs);
    const std::vector<std::vector<double>> cols{x};
    const auto b = bootstrap_weighted_means(w, cols, bs);
    REQUIRE(b.size() == 1);
    CHECK(a.lower == doctest::Approx(b[0].lower).epsilon(1e-12));
    CHECK(a.upper == doctest::Approx(b[0].upper).epsilon(1e-12));
    CHECK(a.point == doctest::Approx(b[0].point).epsilon(1e-12));
  }
}
