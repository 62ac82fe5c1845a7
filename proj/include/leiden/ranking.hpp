#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "leiden/assignment.hpp"
#include "leiden/corpus.hpp"
#include "leiden/geo.hpp"
#include "leiden/indicators.hpp"
#include "leiden/normalization.hpp"
#include "leiden/stability.hpp"

namespace leiden {

struct InputPaths {
  std::filesystem::path publications;
  std::filesystem::path citations;
  std::filesystem::path thesaurus;
  std::filesystem::path institutions;
  std::optional<std::filesystem::path> geo;
};

struct OutputPaths {
  std::filesystem::path report;
  std::optional<std::filesystem::path> summary;
  std::optional<std::filesystem::path> cells;
  std::optional<std::filesystem::path> validation;
  std::optional<std::filesystem::path> assignments;
};

struct RankingConfig {
  InclusionConfig inclusion;
  CountingScheme counting = CountingScheme::fractional;
  int top_n = 500;
  int min_pubs_per_year = 500;
  int min_occurrences = 5;
  double link_threshold = 0.5;
  /// samples == 0 disables stability intervals.
  BootstrapSettings bootstrap;
  InputPaths inputs;
  OutputPaths outputs;

  /// Throws Error("config").
  void validate() const;
  /// Hex digest of every setting that affects indicator values (paths excluded).
  std::string fingerprint() const;
  AssignmentConfig assignment_config() const;
};

struct Selection {
  std::vector<InstIndex> institutions;  // in ranking order
  std::size_t eligible = 0;
  std::optional<std::string> notice;
};

/// Eligibility: at least min_pubs_per_year linked records in every year of
/// the window (each non arts-and-humanities record counts once, any
/// language). Eligible institutions are ordered by full-counting output
/// (letters at letter_weight, any language), descending, ties by id; the
/// first top_n are kept.
Selection select_universities(const Corpus& corpus, const AssignmentTable& at, const Thesaurus& t,
                              const RankingConfig& cfg);

struct RankedRow {
  int rank = 0;
  Institution institution;
  IndicatorReport report;
  std::array<std::optional<StabilityInterval>, kIndicatorCount> intervals{};
};

struct RankingSummary {
  std::size_t corpus_records = 0;
  std::size_t rejected_records = 0;
  std::size_t rejected_citation_lines = 0;
  double included_weight = 0.0;            // sum of inclusion weights over the corpus
  double selected_weight = 0.0;            // of which linked to a ranked institution
  double selected_share = 0.0;             // selected_weight / included_weight
  double non_english_share = 0.0;          // of ranked institutions' window records
  std::size_t eligible_institutions = 0;
  std::size_t ranked_institutions = 0;
  std::map<std::string, std::size_t> institutions_per_country;
  double unmatched_address_rate = 0.0;
  std::size_t zero_mean_publications = 0;  // included publications touching a zero-mean cell
  std::vector<std::string> notices;
};

struct RankingReport {
  std::vector<RankedRow> rows;
  RankingSummary summary;
  std::string fingerprint;
  CountingScheme counting = CountingScheme::fractional;
};

struct PipelineResult {
  AssignmentResult assignment;
  CellTable cells;
  RankingReport report;
};

/// Assign -> cells -> indicators -> intervals -> ordered report, on inputs
/// already in memory. Errors are rethrown as Error tagged with the stage.
PipelineResult run_pipeline(const Corpus& corpus, const CitationGraph& graph, const Thesaurus& t,
                            const GeoTable& geo, const RankingConfig& cfg);

/// Loads every input named in cfg.inputs, runs the pipeline and writes the
/// requested outputs.
RankingReport generate_report(const RankingConfig& cfg);

/// Column order of the delimited export.
std::vector<std::string> export_columns();

/// Comma-separated export, one row per institution; undefined values are "NA".
void export_csv(const RankingReport& report, std::ostream& out);
/// Throws Error("export") when the file cannot be written.
void export_csv(const RankingReport& report, const std::filesystem::path& path);

void write_summary(const RankingSummary& s, std::ostream& out);

/// Splits one CSV line honouring double quotes.
std::vector<std::string> parse_csv_line(std::string_view line);

}  // namespace leiden
