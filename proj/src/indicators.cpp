#include "leiden/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "leiden/error.hpp"
#include "leiden/parallel.hpp"

namespace leiden {

std::string_view to_string(CountingScheme s) { return s == CountingScheme::full ? "full" : "fractional"; }

std::optional<CountingScheme> parse_counting_scheme(std::string_view s) {
  if (s == "full") return CountingScheme::full;
  if (s == "fractional") return CountingScheme::fractional;
  return std::nullopt;
}

namespace {
constexpr std::array<std::string_view, kIndicatorCount> kIndicatorNames{
    "P",        "MCS",       "MNCS",          "PP_top5", "PP_top10",
    "PP_top20", "PP_collab", "PP_int_collab", "MGCD",    "PP_gt1000km"};
}  // namespace

std::string_view to_string(Indicator i) { return kIndicatorNames[static_cast<std::size_t>(i)]; }

std::optional<Indicator> parse_indicator(std::string_view s) {
  for (std::size_t i = 0; i < kIndicatorNames.size(); ++i)
    if (kIndicatorNames[i] == s) return kAllIndicators[i];
  return std::nullopt;
}

double institution_weight(PubIndex p, InstIndex inst, const Corpus& corpus, const AssignmentTable& at,
                          CountingScheme scheme) {
  const AssignmentLink* link = at.find(p, inst);
  if (link == nullptr) return 0.0;
  if (scheme == CountingScheme::full) return 1.0;
  const std::size_t total = corpus[p].addresses.size();
  if (total == 0) return 0.0;
  return static_cast<double>(link->matched_address_count) /
         (static_cast<double>(link->share_divisor) * static_cast<double>(total));
}

double PublicationFacts::value(Indicator i) const {
  switch (i) {
    case Indicator::P:
      return 1.0;
    case Indicator::MCS:
      return citations;
    case Indicator::MNCS:
      return normalized_score;
    case Indicator::PP_top5:
      return top[0];
    case Indicator::PP_top10:
      return top[1];
    case Indicator::PP_top20:
      return top[2];
    case Indicator::PP_collab:
      return collaborative ? 1.0 : 0.0;
    case Indicator::PP_int_collab:
      return international ? 1.0 : 0.0;
    case Indicator::MGCD:
      return distance_km;
    case Indicator::PP_gt1000km:
      return distance_km > 1000.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

bool is_collaborative(const Publication& p) {
  for (std::size_t i = 1; i < p.addresses.size(); ++i)
    if (p.addresses[i].org_tokens != p.addresses[0].org_tokens) return true;
  return false;
}

bool is_international(const Publication& p) {
  const std::string* first = nullptr;
  for (const auto& a : p.addresses) {
    if (a.country.empty()) continue;
    if (first == nullptr)
      first = &a.country;
    else if (a.country != *first)
      return true;
  }
  return false;
}

IndicatorContext::IndicatorContext(const Corpus& corpus, const AssignmentTable& at,
                                   const CellTable& cells, const GeoTable& geo,
                                   const InclusionConfig& cfg)
    : corpus_(corpus), at_(at), cells_(cells), cfg_(cfg), facts_(corpus.size()) {
  parallel_for(corpus.size(), [&](std::size_t i) {
    const auto p = static_cast<PubIndex>(i);
    const Publication& pub = corpus[i];
    PublicationFacts& f = facts_[i];
    f.inclusion_weight = inclusion_weight(pub, cfg);
    if (f.inclusion_weight <= 0.0) return;
    f.citations = cells.citations(p);
    const ScoreResult s = normalized_score(p, cells);
    f.normalized_score = s.score;
    f.zero_mean_cell = s.zero_mean_cell;
    for (std::size_t k = 0; k < kTopPercents.size(); ++k) f.top[k] = top_membership(p, kTopPercents[k], cells);
    f.collaborative = is_collaborative(pub);
    f.international = is_international(pub);
    f.distance_km = collaboration_distance_km(pub, geo);
  });
}

std::vector<WeightedPublication> IndicatorContext::sample(InstIndex inst, CountingScheme scheme) const {
  if (inst >= at_.institution_count()) throw Error("indicators", "unknown institution index");
  std::vector<WeightedPublication> out;
  const auto& links = at_.links();
  for (const std::size_t li : at_.for_institution(inst)) {
    const PubIndex p = links[li].publication;
    const double w = facts_[p].inclusion_weight;
    if (w <= 0.0) continue;
    const double iw = institution_weight(p, inst, corpus_, at_, scheme);
    if (iw <= 0.0) continue;
    out.push_back({p, w * iw});
  }
  return out;
}

std::optional<double> indicator_over(std::span<const WeightedPublication> sample, Indicator ind,
                                     const IndicatorContext& ctx) {
  double total = 0.0;
  double sum = 0.0;
  for (const auto& s : sample) {
    total += s.weight;
    sum += s.weight * ctx.facts(s.publication).value(ind);
  }
  if (ind == Indicator::P) return total;
  if (total <= 0.0) return std::nullopt;
  return sum / total;
}

double compute_P(InstIndex inst, const IndicatorContext& ctx, CountingScheme scheme) {
  return *indicator_over(ctx.sample(inst, scheme), Indicator::P, ctx);
}

std::optional<double> compute_MCS(InstIndex inst, const IndicatorContext& ctx, CountingScheme scheme) {
  return indicator_over(ctx.sample(inst, scheme), Indicator::MCS, ctx);
}

std::optional<double> compute_MNCS(InstIndex inst, const IndicatorContext& ctx, CountingScheme scheme) {
  return indicator_over(ctx.sample(inst, scheme), Indicator::MNCS, ctx);
}

std::optional<double> compute_PPtop(InstIndex inst, int percent, const IndicatorContext& ctx,
                                    CountingScheme scheme) {
  static constexpr std::array<Indicator, 3> kTop{Indicator::PP_top5, Indicator::PP_top10,
                                                 Indicator::PP_top20};
  return indicator_over(ctx.sample(inst, scheme), kTop[top_slot(percent)], ctx);
}

CollaborationIndicators compute_collab_indicators(InstIndex inst, const IndicatorContext& ctx,
                                                  CountingScheme scheme) {
  const auto s = ctx.sample(inst, scheme);
  return {indicator_over(s, Indicator::PP_collab, ctx), indicator_over(s, Indicator::PP_int_collab, ctx),
          indicator_over(s, Indicator::MGCD, ctx), indicator_over(s, Indicator::PP_gt1000km, ctx)};
}

IndicatorReport compute_report(InstIndex inst, const IndicatorContext& ctx, CountingScheme scheme) {
  const auto s = ctx.sample(inst, scheme);
  IndicatorReport r;
  double total = 0.0;
  std::array<double, kIndicatorCount> sums{};
  for (const auto& w : s) {
    total += w.weight;
    const auto& f = ctx.facts(w.publication);
    for (std::size_t k = 1; k < kIndicatorCount; ++k) sums[k] += w.weight * f.value(kAllIndicators[k]);
  }
  r.values[0] = total;
  if (total > 0.0)
    for (std::size_t k = 1; k < kIndicatorCount; ++k) r.values[k] = sums[k] / total;
  return r;
}

std::optional<double> pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error("indicators", "correlation inputs differ in length");
  if (xs.size() < 2) throw Error("indicators", "correlation needs at least two values");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<FieldBonusRatio> full_counting_bonus_ratios(const Corpus& corpus, const CellTable& cells,
                                                         const InclusionConfig& cfg) {
  struct Acc {
    double w = 0.0, wc = 0.0, aw = 0.0, awc = 0.0;
  };
  std::map<std::string, Acc> by_field;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus[i];
    const double w = inclusion_weight(p, cfg);
    if (w <= 0.0) continue;
    const double c = cells.citations(static_cast<PubIndex>(i));
    const double a = static_cast<double>(p.addresses.size());
    for (const auto& f : p.fields) {
      Acc& acc = by_field[f.label];
      const double fw = w * f.fraction;
      acc.w += fw;
      acc.wc += fw * c;
      acc.aw += fw * a;
      acc.awc += fw * a * c;
    }
  }
  std::vector<FieldBonusRatio> out;
  for (const auto& [field, acc] : by_field) {
    FieldBonusRatio r;
    r.field = field;
    r.unweighted_mean = acc.w > 0.0 ? acc.wc / acc.w : 0.0;
    r.address_weighted_mean = acc.aw > 0.0 ? acc.awc / acc.aw : 0.0;
    if (r.unweighted_mean > 0.0) r.ratio = r.address_weighted_mean / r.unweighted_mean;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace leiden
