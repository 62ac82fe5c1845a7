#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leiden/assignment.hpp"
#include "leiden/corpus.hpp"
#include "leiden/geo.hpp"
#include "leiden/indicators.hpp"

namespace leiden::synth {

struct Params {
  int n_institutions = 20;
  int n_publications = 2000;
  std::vector<std::string> fields{"Cardiology", "Chemistry", "Mathematics", "Physics"};
  int year_min = 2005;
  int year_max = 2009;
  int citation_window_end = 2010;

  double collaboration_rate = 0.4;   // publications with more than one institution
  double international_rate = 0.3;   // collaborators drawn from another country
  double multi_field_rate = 0.2;     // publications with two field labels
  double letter_share = 0.1;
  double review_share = 0.1;
  double non_english_share = 0.03;
  double arts_humanities_share = 0.0;

  double citation_mean = 6.0;
  double dispersion = 1.5;                  // gamma shape of the Poisson-gamma mixture
  double collab_citation_multiplier = 1.0;  // mean multiplier for multi-institution publications
  double self_citation_bias = 0.1;          // share of citing slots filled by an author's own work

  int outlier_count = 0;
  std::uint32_t outlier_citations = 16000;
  int outlier_institution = 0;

  double unmatchable_address_rate = 0.0;  // addresses naming no thesaurus organization
  double hospital_rate = 0.0;             // home address replaced by an academic hospital
  double missing_geo_rate = 0.0;          // institutions without coordinates

  int citing_pool = -1;  // extra citing-only records after the window; -1 = n_publications / 4
  int authors_per_institution = 40;
  std::uint64_t seed = 1;

  /// Throws Error("synthkit") for inconsistent parameters.
  void validate() const;
};

struct TruthLink {
  InstIndex institution = 0;
  std::uint32_t matched_addresses = 0;
};

struct Bundle {
  Corpus corpus;
  std::vector<std::pair<PubIndex, PubIndex>> edges;  // (citing, cited)
  CitationGraph graph;
  std::vector<ThesaurusEntry> thesaurus_entries;
  std::vector<Institution> institutions;
  Thesaurus thesaurus;
  std::vector<std::pair<std::string, GeoPoint>> geo_entries;
  GeoTable geo;

  // Ground truth.
  std::vector<std::vector<TruthLink>> truth_links;                // per publication, exact-variant addresses
  std::vector<std::vector<std::optional<GeoPoint>>> truth_coords;  // per publication and address
  std::size_t total_addresses = 0;
  std::size_t unmatchable_addresses = 0;
  std::vector<PubIndex> outliers;
  std::size_t main_publications = 0;  // records inside the year window come first
};

Bundle generate(const Params& params);

struct BundleTexts {
  std::string publications;
  std::string citations;
  std::string thesaurus;
  std::string institutions;
  std::string geo;
};

/// The bundle in the file formats the CLI ingests.
BundleTexts to_texts(const Bundle& b);
/// Writes publications.jsonl, citations.tsv, thesaurus.tsv, institutions.tsv
/// and geo.tsv into `dir`.
void write_bundle(const Bundle& b, const std::filesystem::path& dir);

struct OracleConfig {
  InclusionConfig inclusion;
  CountingScheme counting = CountingScheme::fractional;
};

/// Brute-force restatement of every indicator definition over a bundle,
/// using the generator's ground-truth links and coordinates. Shares no
/// scoring code with the engine.
class Oracle {
 public:
  Oracle(const Bundle& bundle, const OracleConfig& cfg);

  /// nullopt for undefined mean indicators (institution without weight).
  /// Throws Error("synthkit") for an unknown indicator name.
  std::optional<double> indicator(std::string_view name, InstIndex inst) const;

  double publication_weight(PubIndex p) const { return inclusion_[p]; }
  std::uint32_t citations(PubIndex p) const { return citations_[p]; }
  double normalized_score(PubIndex p) const { return score_[p]; }
  double top_membership(PubIndex p, int percent) const;

 private:
  const Bundle& bundle_;
  OracleConfig cfg_;
  std::vector<double> inclusion_;
  std::vector<std::uint32_t> citations_;
  std::vector<double> score_;
  std::vector<double> top5_, top10_, top20_;
  std::vector<double> distance_;
};

/// One-shot form of Oracle::indicator.
std::optional<double> oracle_indicator(std::string_view name, InstIndex inst, const Bundle& bundle,
                                       const OracleConfig& cfg);

}  // namespace leiden::synth
