#include "leiden/normalization.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>

#include "leiden/error.hpp"
#include "leiden/parallel.hpp"

namespace leiden {

std::size_t top_slot(int percent) {
  for (std::size_t i = 0; i < kTopPercents.size(); ++i)
    if (kTopPercents[i] == percent) return i;
  throw Error("normalization", fmt::format("unsupported top percentage {}", percent));
}

std::optional<std::size_t> CellTable::find(const CellKey& key) const {
  const auto it = std::lower_bound(cells_.begin(), cells_.end(), key,
                                   [](const NormalizationCell& c, const CellKey& k) { return c.key < k; });
  if (it == cells_.end() || it->key != key) return std::nullopt;
  return static_cast<std::size_t>(it - cells_.begin());
}

bool CellTable::contains(PubIndex p) const {
  return static_cast<std::size_t>(p) + 1 < offsets_.size() && offsets_[p + 1] > offsets_[p];
}

std::span<const CellRef> CellTable::cells_of(PubIndex p) const {
  if (static_cast<std::size_t>(p) + 1 >= offsets_.size()) return {};
  return {refs_.data() + offsets_[p], offsets_[p + 1] - offsets_[p]};
}

namespace {

struct Member {
  std::uint32_t citations;
  double weight;
};

void finish_cell(NormalizationCell& cell, std::vector<Member>& members) {
  double total = 0.0;
  double weighted = 0.0;
  for (const auto& m : members) {
    total += m.weight;
    weighted += m.weight * m.citations;
  }
  cell.member_weight_total = total;
  cell.expected_citations = total > 0.0 ? weighted / total : 0.0;
  if (total <= 0.0) return;

  std::sort(members.begin(), members.end(),
            [](const Member& a, const Member& b) { return a.citations > b.citations; });
  for (std::size_t slot = 0; slot < kTopPercents.size(); ++slot) {
    const double target = total * kTopPercents[slot] / 100.0;
    double above = 0.0;
    std::size_t i = 0;
    while (i < members.size()) {
      const std::uint32_t value = members[i].citations;
      double at = 0.0;
      std::size_t j = i;
      while (j < members.size() && members[j].citations == value) at += members[j++].weight;
      if (above + at >= target || j == members.size()) {
        cell.top[slot].citations = value;
        cell.top[slot].tie_fraction = std::clamp((target - above) / at, 0.0, 1.0);
        break;
      }
      above += at;
      i = j;
    }
  }
}

}  // namespace

CellTable build_cells(const Corpus& corpus, std::vector<std::uint32_t> citations,
                      const InclusionConfig& cfg) {
  if (citations.size() != corpus.size())
    throw Error("normalization", "citation counts do not match the corpus");
  CellTable table;
  table.citations_ = std::move(citations);

  // Collect keys in first-seen order, then renumber in key order.
  std::unordered_map<std::string, std::uint32_t> field_ids;
  std::vector<std::string> field_names;
  struct RawKey {
    std::uint32_t field;
    int year;
    DocType type;
    bool operator==(const RawKey&) const = default;
  };
  struct RawKeyHash {
    std::size_t operator()(const RawKey& k) const noexcept {
      return (static_cast<std::size_t>(k.field) * 1000003u) ^ (static_cast<std::size_t>(k.year) << 3) ^
             static_cast<std::size_t>(k.type);
    }
  };
  std::unordered_map<RawKey, std::uint32_t, RawKeyHash> cell_ids;
  std::vector<RawKey> raw_keys;

  table.offsets_.assign(corpus.size() + 1, 0);
  std::vector<double> weights(corpus.size(), 0.0);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus[i];
    weights[i] = inclusion_weight(p, cfg);
    if (weights[i] <= 0.0) {
      table.offsets_[i + 1] = table.refs_.size();
      continue;
    }
    for (const auto& f : p.fields) {
      auto [fit, fnew] = field_ids.try_emplace(f.label, static_cast<std::uint32_t>(field_names.size()));
      if (fnew) field_names.push_back(f.label);
      const RawKey key{fit->second, p.year, p.doc_type};
      auto [cit, cnew] = cell_ids.try_emplace(key, static_cast<std::uint32_t>(raw_keys.size()));
      if (cnew) raw_keys.push_back(key);
      table.refs_.push_back({cit->second, f.fraction});
    }
    table.offsets_[i + 1] = table.refs_.size();
  }

  std::vector<std::uint32_t> order(raw_keys.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  auto key_of = [&](std::uint32_t c) {
    return CellKey{field_names[raw_keys[c].field], raw_keys[c].year, raw_keys[c].type};
  };
  std::vector<CellKey> keys;
  keys.reserve(raw_keys.size());
  for (std::uint32_t c = 0; c < raw_keys.size(); ++c) keys.push_back(key_of(c));
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
  std::vector<std::uint32_t> remap(raw_keys.size());
  for (std::uint32_t pos = 0; pos < order.size(); ++pos) remap[order[pos]] = pos;
  for (auto& r : table.refs_) r.cell = remap[r.cell];

  std::vector<std::vector<Member>> members(order.size());
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t k = table.offsets_[i]; k < table.offsets_[i + 1]; ++k) {
      const auto& r = table.refs_[k];
      members[r.cell].push_back({table.citations_[i], weights[i] * r.fraction});
    }

  table.cells_.resize(order.size());
  for (std::uint32_t pos = 0; pos < order.size(); ++pos) table.cells_[pos].key = keys[order[pos]];
  parallel_for(table.cells_.size(), [&](std::size_t c) { finish_cell(table.cells_[c], members[c]); });
  return table;
}

CellTable build_cells(const Corpus& corpus, const CitationGraph& g, const InclusionConfig& cfg) {
  return build_cells(corpus, countable_citation_counts(corpus, g, cfg), cfg);
}

ScoreResult normalized_score(PubIndex p, const CellTable& cells) {
  if (!cells.contains(p)) throw Error("normalization", "publication is not in the cell table");
  ScoreResult r;
  const double c = cells.citations(p);
  for (const auto& ref : cells.cells_of(p)) {
    const auto& cell = cells.cells()[ref.cell];
    if (cell.zero_mean()) {
      r.zero_mean_cell = true;
      continue;
    }
    r.score += ref.fraction * (c / cell.expected_citations);
  }
  return r;
}

double top_membership(PubIndex p, int percent, const CellTable& cells) {
  const std::size_t slot = top_slot(percent);
  if (!cells.contains(p)) throw Error("normalization", "publication is not in the cell table");
  const std::uint32_t c = cells.citations(p);
  double m = 0.0;
  for (const auto& ref : cells.cells_of(p)) {
    const auto& t = cells.cells()[ref.cell].top[slot];
    if (c > t.citations)
      m += ref.fraction;
    else if (c == t.citations)
      m += ref.fraction * t.tie_fraction;
  }
  return m;
}

void write_cell_table(const CellTable& cells, std::ostream& out) {
  out << "field\tyear\tdoc_type\tweight\tmean";
  for (const int x : kTopPercents) out << "\ttop" << x << "_threshold\ttop" << x << "_tie";
  out << '\n';
  for (const auto& c : cells.cells()) {
    out << c.key.field << '\t' << c.key.year << '\t' << to_string(c.key.doc_type) << '\t'
        << fmt::format("{:.6f}\t{:.6f}", c.member_weight_total, c.expected_citations);
    for (const auto& t : c.top) out << '\t' << t.citations << '\t' << fmt::format("{:.6f}", t.tie_fraction);
    out << '\n';
  }
}

}  // namespace leiden
