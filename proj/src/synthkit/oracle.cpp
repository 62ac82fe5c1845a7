#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <fmt/format.h>

#include "leiden/error.hpp"
#include "leiden/synthkit.hpp"

namespace leiden::synth {

namespace {

double oracle_inclusion(const Publication& p, const InclusionConfig& cfg) {
  if (p.year < cfg.year_min || p.year > cfg.year_max) return 0.0;
  if (p.is_arts_humanities) return 0.0;
  if (cfg.english_only && p.language != "en") return 0.0;
  if (p.doc_type == DocType::letter) return cfg.letter_weight;
  return 1.0;
}

bool common_author(const Publication& a, const Publication& b) {
  for (const auto& x : a.authors)
    for (const auto& y : b.authors)
      if (x.last_name == y.last_name && x.initials == y.initials) return true;
  return false;
}

// Great-circle distance through the chord length between unit vectors.
double chord_km(const GeoPoint& a, const GeoPoint& b) {
  const double d = std::numbers::pi / 180.0;
  auto unit = [&](const GeoPoint& g) {
    return std::array<double, 3>{std::cos(g.lat * d) * std::cos(g.lon * d),
                                 std::cos(g.lat * d) * std::sin(g.lon * d), std::sin(g.lat * d)};
  };
  const auto u = unit(a);
  const auto v = unit(b);
  const double chord = std::sqrt((u[0] - v[0]) * (u[0] - v[0]) + (u[1] - v[1]) * (u[1] - v[1]) +
                                 (u[2] - v[2]) * (u[2] - v[2]));
  return 2.0 * 6371.0 * std::asin(std::min(1.0, chord / 2.0));
}

}  // namespace

Oracle::Oracle(const Bundle& bundle, const OracleConfig& cfg) : bundle_(bundle), cfg_(cfg) {
  const Corpus& c = bundle.corpus;
  const std::size_t n = c.size();
  inclusion_.resize(n);
  for (std::size_t i = 0; i < n; ++i) inclusion_[i] = oracle_inclusion(c[i], cfg.inclusion);

  citations_.assign(n, 0);
  for (const auto& [citing, cited] : bundle.edges) {
    if (c[citing].year > cfg.inclusion.citation_window_end) continue;
    if (cfg.inclusion.exclude_self_citations && common_author(c[citing], c[cited])) continue;
    ++citations_[cited];
  }

  std::vector<std::size_t> included;
  for (std::size_t i = 0; i < n; ++i)
    if (inclusion_[i] > 0.0) included.push_back(i);

  score_.assign(n, 0.0);
  top5_.assign(n, 0.0);
  top10_.assign(n, 0.0);
  top20_.assign(n, 0.0);
  for (const std::size_t p : included) {
    const Publication& pub = c[p];
    for (const auto& share : pub.fields) {
      double total = 0.0, cited = 0.0, above = 0.0, at = 0.0;
      for (const std::size_t q : included) {
        const Publication& other = c[q];
        if (other.year != pub.year || other.doc_type != pub.doc_type) continue;
        double frac = 0.0;
        for (const auto& f : other.fields)
          if (f.label == share.label) frac += f.fraction;
        if (frac == 0.0) continue;
        const double w = inclusion_[q] * frac;
        total += w;
        cited += w * citations_[q];
        if (citations_[q] > citations_[p]) above += w;
        if (citations_[q] == citations_[p]) at += w;
      }
      const double mean = cited / total;
      if (mean > 0.0) score_[p] += share.fraction * citations_[p] / mean;
      auto member = [&](double percent) {
        const double target = percent / 100.0 * total;
        return at > 0.0 ? std::clamp((target - above) / at, 0.0, 1.0) : 0.0;
      };
      top5_[p] += share.fraction * member(5);
      top10_[p] += share.fraction * member(10);
      top20_[p] += share.fraction * member(20);
    }
  }

  distance_.assign(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    const auto& coords = bundle.truth_coords[p];
    for (std::size_t i = 0; i < coords.size(); ++i)
      for (std::size_t j = i + 1; j < coords.size(); ++j)
        if (coords[i] && coords[j]) distance_[p] = std::max(distance_[p], chord_km(*coords[i], *coords[j]));
  }
}

double Oracle::top_membership(PubIndex p, int percent) const {
  switch (percent) {
    case 5:
      return top5_[p];
    case 10:
      return top10_[p];
    case 20:
      return top20_[p];
    default:
      throw Error("synthkit", fmt::format("no top-{}% indicator", percent));
  }
}

std::optional<double> Oracle::indicator(std::string_view name, InstIndex inst) const {
  static constexpr std::array<std::string_view, 10> kNames{
      "P", "MCS", "MNCS", "PP_top5", "PP_top10", "PP_top20", "PP_collab", "PP_int_collab", "MGCD", "PP_gt1000km"};
  const auto it = std::find(kNames.begin(), kNames.end(), name);
  if (it == kNames.end()) throw Error("synthkit", fmt::format("unknown indicator '{}'", name));
  const auto which = static_cast<std::size_t>(it - kNames.begin());
  const Corpus& c = bundle_.corpus;

  double weight_sum = 0.0;
  double value_sum = 0.0;
  for (std::size_t p = 0; p < c.size(); ++p) {
    if (inclusion_[p] <= 0.0) continue;
    double share = 0.0;
    for (const auto& link : bundle_.truth_links[p]) {
      if (link.institution != inst) continue;
      share = cfg_.counting == CountingScheme::full
                  ? 1.0
                  : static_cast<double>(link.matched_addresses) / static_cast<double>(c[p].addresses.size());
    }
    const double w = inclusion_[p] * share;
    if (w <= 0.0) continue;
    double v = 0.0;
    switch (which) {
      case 1:
        v = citations_[p];
        break;
      case 2:
        v = score_[p];
        break;
      case 3:
        v = top5_[p];
        break;
      case 4:
        v = top10_[p];
        break;
      case 5:
        v = top20_[p];
        break;
      case 6: {
        std::set<std::vector<std::string>> orgs;
        for (const auto& a : c[p].addresses) orgs.insert(a.org_tokens);
        v = orgs.size() >= 2 ? 1.0 : 0.0;
        break;
      }
      case 7: {
        std::set<std::string> countries;
        for (const auto& a : c[p].addresses)
          if (!a.country.empty()) countries.insert(a.country);
        v = countries.size() >= 2 ? 1.0 : 0.0;
        break;
      }
      case 8:
        v = distance_[p];
        break;
      case 9:
        v = distance_[p] > 1000.0 ? 1.0 : 0.0;
        break;
      default:
        break;
    }
    weight_sum += w;
    value_sum += w * v;
  }
  if (which == 0) return weight_sum;
  if (weight_sum <= 0.0) return std::nullopt;
  return value_sum / weight_sum;
}

std::optional<double> oracle_indicator(std::string_view name, InstIndex inst, const Bundle& bundle,
                                       const OracleConfig& cfg) {
  return Oracle(bundle, cfg).indicator(name, inst);
}

}  // namespace leiden::synth
