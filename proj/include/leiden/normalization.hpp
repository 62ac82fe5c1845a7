#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leiden/corpus.hpp"

namespace leiden {

inline constexpr std::array<int, 3> kTopPercents{5, 10, 20};

/// Index of x in kTopPercents; throws Error("normalization") for other values.
std::size_t top_slot(int percent);

struct CellKey {
  std::string field;
  int year = 0;
  DocType doc_type = DocType::article;

  auto operator<=>(const CellKey&) const = default;
};

/// Publications cited more than `citations` are in the top x%; those cited
/// exactly `citations` times get `tie_fraction` credit.
struct TopThreshold {
  std::uint32_t citations = 0;
  double tie_fraction = 0.0;
};

struct NormalizationCell {
  CellKey key;
  double expected_citations = 0.0;
  double member_weight_total = 0.0;
  std::array<TopThreshold, kTopPercents.size()> top{};

  bool zero_mean() const noexcept { return expected_citations <= 0.0; }
};

struct CellRef {
  std::uint32_t cell = 0;
  double fraction = 0.0;
};

/// (field, year, doc_type) reference statistics over the included
/// publications, plus each included publication's cell memberships and the
/// countable citation counts the statistics were built from.
class CellTable {
 public:
  const std::vector<NormalizationCell>& cells() const noexcept { return cells_; }
  std::optional<std::size_t> find(const CellKey& key) const;
  bool contains(PubIndex p) const;
  std::span<const CellRef> cells_of(PubIndex p) const;
  std::uint32_t citations(PubIndex p) const { return citations_[p]; }
  std::span<const std::uint32_t> citation_counts() const noexcept { return citations_; }

 private:
  friend CellTable build_cells(const Corpus&, std::vector<std::uint32_t>, const InclusionConfig&);

  std::vector<NormalizationCell> cells_;
  std::vector<std::size_t> offsets_;  // per publication into refs_
  std::vector<CellRef> refs_;
  std::vector<std::uint32_t> citations_;
};

/// Builds the cell table from precomputed countable citation counts (one per
/// corpus publication). Each included publication contributes
/// inclusion_weight x field fraction to every one of its field cells.
CellTable build_cells(const Corpus& corpus, std::vector<std::uint32_t> citations,
                      const InclusionConfig& cfg);
CellTable build_cells(const Corpus& corpus, const CitationGraph& g, const InclusionConfig& cfg);

struct ScoreResult {
  double score = 0.0;
  bool zero_mean_cell = false;  // some cell had expected citations 0 and contributed 0
};

/// Sum over the publication's cells of fraction x citations / expected.
/// Throws Error("normalization") when the publication is not in the table.
ScoreResult normalized_score(PubIndex p, const CellTable& cells);

/// Fractional top-x% membership in [0, 1], combined over cells by field fraction.
double top_membership(PubIndex p, int percent, const CellTable& cells);

/// Tab-separated audit export, one row per cell in key order.
void write_cell_table(const CellTable& cells, std::ostream& out);

}  // namespace leiden
