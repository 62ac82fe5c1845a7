#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leiden/assignment.hpp"
#include "leiden/corpus.hpp"
#include "leiden/geo.hpp"
#include "leiden/normalization.hpp"

namespace leiden {

enum class CountingScheme : std::uint8_t { full, fractional };

std::string_view to_string(CountingScheme s);
std::optional<CountingScheme> parse_counting_scheme(std::string_view s);

enum class Indicator : std::uint8_t {
  P,
  MCS,
  MNCS,
  PP_top5,
  PP_top10,
  PP_top20,
  PP_collab,
  PP_int_collab,
  MGCD,
  PP_gt1000km,
};

inline constexpr std::size_t kIndicatorCount = 10;
inline constexpr std::array<Indicator, kIndicatorCount> kAllIndicators{
    Indicator::P,       Indicator::MCS,       Indicator::MNCS,          Indicator::PP_top5,
    Indicator::PP_top10, Indicator::PP_top20, Indicator::PP_collab,     Indicator::PP_int_collab,
    Indicator::MGCD,    Indicator::PP_gt1000km};

std::string_view to_string(Indicator i);
std::optional<Indicator> parse_indicator(std::string_view s);
/// Everything except P is a weighted mean over the institution's publications.
inline bool is_mean_indicator(Indicator i) { return i != Indicator::P; }

/// Fractional weight: matched addresses over all addresses of the
/// publication (round-two links share their hospital addresses). Full: 1.
/// 0 when the publication is not linked to the institution.
double institution_weight(PubIndex p, InstIndex inst, const Corpus& corpus, const AssignmentTable& at,
                          CountingScheme scheme);

/// Per-publication quantities the indicators average.
struct PublicationFacts {
  double inclusion_weight = 0.0;
  double citations = 0.0;
  double normalized_score = 0.0;
  std::array<double, kTopPercents.size()> top{};
  bool collaborative = false;
  bool international = false;
  double distance_km = 0.0;
  bool zero_mean_cell = false;

  /// Value averaged by a mean indicator.
  double value(Indicator i) const;
};

/// At least two distinct normalized organizations in the address list.
bool is_collaborative(const Publication& p);
/// At least two distinct non-empty countries in the address list.
bool is_international(const Publication& p);

struct WeightedPublication {
  PubIndex publication = 0;
  double weight = 0.0;  // inclusion weight x institution weight
};

struct IndicatorReport {
  std::string institution_id;
  std::array<std::optional<double>, kIndicatorCount> values{};
  std::string config_fingerprint;

  std::optional<double> get(Indicator i) const { return values[static_cast<std::size_t>(i)]; }
  double P() const { return values[0].value_or(0.0); }
};

/// Immutable per-run state: corpus, assignment, cells and geo table plus the
/// per-publication facts derived from them.
class IndicatorContext {
 public:
  IndicatorContext(const Corpus& corpus, const AssignmentTable& at, const CellTable& cells,
                   const GeoTable& geo, const InclusionConfig& cfg);

  const Corpus& corpus() const noexcept { return corpus_; }
  const AssignmentTable& assignments() const noexcept { return at_; }
  const CellTable& cells() const noexcept { return cells_; }
  const InclusionConfig& config() const noexcept { return cfg_; }
  const PublicationFacts& facts(PubIndex p) const { return facts_[p]; }
  std::span<const PublicationFacts> all_facts() const noexcept { return facts_; }

  /// Included publications linked to `inst`, in publication order, with
  /// their combined weights. Zero-weight publications are omitted.
  std::vector<WeightedPublication> sample(InstIndex inst, CountingScheme scheme) const;

 private:
  const Corpus& corpus_;
  const AssignmentTable& at_;
  const CellTable& cells_;
  InclusionConfig cfg_;
  std::vector<PublicationFacts> facts_;
};

/// Weighted mean of an indicator over an explicit sample (used by the
/// bootstrap); nullopt when the total weight is 0. Indicator::P returns the
/// weight sum.
std::optional<double> indicator_over(std::span<const WeightedPublication> sample, Indicator ind,
                                     const IndicatorContext& ctx);

/// Throws Error("indicators") when `inst` is out of range.
double compute_P(InstIndex inst, const IndicatorContext& ctx, CountingScheme scheme);
std::optional<double> compute_MCS(InstIndex inst, const IndicatorContext& ctx, CountingScheme scheme);
std::optional<double> compute_MNCS(InstIndex inst, const IndicatorContext& ctx, CountingScheme scheme);
std::optional<double> compute_PPtop(InstIndex inst, int percent, const IndicatorContext& ctx,
                                    CountingScheme scheme);

struct CollaborationIndicators {
  std::optional<double> pp_collab;
  std::optional<double> pp_int_collab;
  std::optional<double> mgcd_km;
  std::optional<double> pp_gt1000km;
};
CollaborationIndicators compute_collab_indicators(InstIndex inst, const IndicatorContext& ctx,
                                                  CountingScheme scheme);

/// All indicators for one institution; institution_id and the fingerprint
/// are left for the caller to fill.
IndicatorReport compute_report(InstIndex inst, const IndicatorContext& ctx, CountingScheme scheme);

/// Sample Pearson correlation; nullopt when either variance is zero.
/// Throws Error("indicators") on length mismatch or fewer than two values.
std::optional<double> pearson_correlation(std::span<const double> xs, std::span<const double> ys);

struct FieldBonusRatio {
  std::string field;
  double unweighted_mean = 0.0;
  double address_weighted_mean = 0.0;
  std::optional<double> ratio;  // nullopt when the unweighted mean is 0
};

/// Per field: mean countable citations with each publication additionally
/// weighted by its number of addresses, over the plain mean. Ratios above 1
/// indicate that multi-address publications are cited more.
std::vector<FieldBonusRatio> full_counting_bonus_ratios(const Corpus& corpus, const CellTable& cells,
                                                         const InclusionConfig& cfg);

}  // namespace leiden
