#include "leiden/assignment.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>

#include <fmt/format.h>

#include "leiden/error.hpp"
#include "leiden/parallel.hpp"
#include "leiden/text.hpp"

namespace leiden {

std::vector<std::string> normalize_org_name(std::string_view raw) { return fold_tokens(raw); }

std::string_view to_string(OrgKind k) {
  switch (k) {
    case OrgKind::university:
      return "university";
    case OrgKind::hospital:
      return "hospital";
    case OrgKind::system_member:
      return "system-member";
  }
  return "university";
}

std::optional<OrgKind> parse_org_kind(std::string_view s) {
  if (s == "university") return OrgKind::university;
  if (s == "hospital") return OrgKind::hospital;
  if (s == "system-member") return OrgKind::system_member;
  return std::nullopt;
}

namespace {

std::uint64_t token_hash(std::string_view tok) { return fnv1a64(tok); }

std::uint64_t window_hash(std::span<const std::uint64_t> token_hashes) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (const auto t : token_hashes) {
    h ^= t + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

std::uint64_t variant_hash(const std::vector<std::string>& tokens) {
  std::vector<std::uint64_t> hashes;
  hashes.reserve(tokens.size());
  for (const auto& t : tokens) hashes.push_back(token_hash(t));
  return window_hash(hashes);
}

}  // namespace

Thesaurus::Thesaurus(std::vector<ThesaurusEntry> entries, std::vector<Institution> institutions)
    : entries_(std::move(entries)), institutions_(std::move(institutions)) {
  for (std::size_t i = 0; i < institutions_.size(); ++i) {
    if (institutions_[i].id.empty()) throw Error("thesaurus", "empty institution id");
    if (!inst_index_.emplace(institutions_[i].id, static_cast<InstIndex>(i)).second)
      throw Error("thesaurus", "duplicate institution id '" + institutions_[i].id + "'");
  }
  std::set<std::pair<bool, std::vector<std::string>>> seen;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.variant_tokens.empty()) throw Error("thesaurus", "empty variant for '" + e.institution_id + "'");
    if (e.occurrence_count < 1)
      throw Error("thesaurus", "occurrence count below one for '" + join(e.variant_tokens) + "'");
    if (e.institution_id.empty()) throw Error("thesaurus", "empty organization id");
    if (e.kind == OrgKind::hospital) {
      if (inst_index_.count(e.institution_id))
        throw Error("thesaurus", "hospital id '" + e.institution_id + "' is also an institution");
      hospitals_[e.institution_id] = true;
    } else if (!inst_index_.count(e.institution_id)) {
      throw Error("thesaurus", "unknown institution '" + e.institution_id + "'");
    }
    const bool dept = e.kind == OrgKind::system_member;
    if (!seen.emplace(dept, e.variant_tokens).second)
      throw Error("thesaurus", "duplicate variant '" + join(e.variant_tokens) + "'");
    Domain& d = dept ? department_domain_ : org_domain_;
    d.by_hash[variant_hash(e.variant_tokens)].push_back(i);
    d.max_len = std::max(d.max_len, e.variant_tokens.size());
  }
}

std::optional<InstIndex> Thesaurus::find_institution(std::string_view id) const {
  const auto it = inst_index_.find(std::string(id));
  if (it == inst_index_.end()) return std::nullopt;
  return it->second;
}

bool Thesaurus::is_hospital(std::string_view org_id) const {
  return hospitals_.count(std::string(org_id)) != 0;
}

void Thesaurus::find_matches(std::span<const std::string> tokens, bool department_domain,
                             std::vector<std::size_t>& out) const {
  const Domain& d = department_domain ? department_domain_ : org_domain_;
  if (d.by_hash.empty() || tokens.empty()) return;
  std::uint64_t local[32];
  std::vector<std::uint64_t> heap;
  std::uint64_t* hashes = local;
  if (tokens.size() > std::size(local)) {
    heap.resize(tokens.size());
    hashes = heap.data();
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) hashes[i] = token_hash(tokens[i]);
  const std::size_t max_len = std::min(d.max_len, tokens.size());
  for (std::size_t len = 1; len <= max_len; ++len) {
    for (std::size_t start = 0; start + len <= tokens.size(); ++start) {
      const auto it = d.by_hash.find(window_hash({hashes + start, len}));
      if (it == d.by_hash.end()) continue;
      for (const std::size_t e : it->second) {
        const auto& v = entries_[e].variant_tokens;
        if (v.size() == len && std::equal(v.begin(), v.end(), tokens.begin() + start)) out.push_back(e);
      }
    }
  }
}

namespace {

std::vector<std::string_view> split_rows(std::string_view text) {
  std::vector<std::string_view> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    if (trim(line).empty() || trim(line).front() == '#') continue;
    rows.push_back(line);
  }
  return rows;
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("thesaurus", fmt::format("cannot open {} file '{}'", what, path.string()));
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

Thesaurus load_thesaurus(std::string_view thesaurus_text, std::string_view institutions_text) {
  std::vector<Institution> institutions;
  const auto inst_rows = split_rows(institutions_text);
  for (std::size_t i = 0; i < inst_rows.size(); ++i) {
    const auto cols = split(inst_rows[i], '\t');
    if (i == 0 && !cols.empty() && trim(cols[0]) == "id") continue;
    if (cols.size() != 3)
      throw Error("thesaurus", fmt::format("institutions row {}: expected 3 columns", i + 1));
    institutions.push_back({std::string(trim(cols[0])), std::string(trim(cols[1])),
                            std::string(trim(cols[2]))});
  }

  std::vector<ThesaurusEntry> entries;
  const auto rows = split_rows(thesaurus_text);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto cols = split(rows[i], '\t');
    if (i == 0 && !cols.empty() && trim(cols[0]) == "variant") continue;
    if (cols.size() != 4)
      throw Error("thesaurus", fmt::format("thesaurus row {}: expected 4 columns", i + 1));
    ThesaurusEntry e;
    e.variant_tokens = normalize_org_name(cols[0]);
    e.institution_id = std::string(trim(cols[1]));
    const auto count_text = std::string(trim(cols[2]));
    try {
      std::size_t used = 0;
      e.occurrence_count = std::stoi(count_text, &used);
      if (used != count_text.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error("thesaurus", fmt::format("thesaurus row {}: invalid occurrence count", i + 1));
    }
    const auto kind = parse_org_kind(trim(cols[3]));
    if (!kind) throw Error("thesaurus", fmt::format("thesaurus row {}: unknown kind", i + 1));
    e.kind = *kind;
    entries.push_back(std::move(e));
  }
  return Thesaurus(std::move(entries), std::move(institutions));
}

Thesaurus load_thesaurus_files(const std::filesystem::path& thesaurus,
                               const std::filesystem::path& institutions) {
  return load_thesaurus(read_file(thesaurus, "thesaurus"), read_file(institutions, "institutions"));
}

// ---------------------------------------------------------------------------
// Round one

namespace {

// Picks the longest entry among `matches` whose kind passes `accept`.
// Returns false when nothing qualifies.
template <class Accept>
bool pick_longest(const Thesaurus& t, const std::vector<std::size_t>& matches, int min_occurrences,
                  Accept accept, Round1Match& out) {
  std::size_t best_len = 0;
  std::vector<std::size_t> best;
  for (const std::size_t e : matches) {
    const auto& entry = t.entries()[e];
    if (entry.occurrence_count < min_occurrences || !accept(entry.kind)) continue;
    const std::size_t len = entry.variant_tokens.size();
    if (len > best_len) {
      best_len = len;
      best.assign(1, e);
    } else if (len == best_len) {
      best.push_back(e);
    }
  }
  if (best.empty()) return false;
  std::vector<std::string> ids;
  for (const std::size_t e : best) ids.push_back(t.entries()[e].institution_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() > 1) {
    out.ambiguous = true;
    out.candidates = std::move(ids);
    return true;
  }
  out.org_id = ids.front();
  out.kind = t.entries()[best.front()].kind;
  return true;
}

}  // namespace

Round1Match match_round1(const Address& addr, const Thesaurus& t, int min_occurrences) {
  Round1Match result;
  std::vector<std::size_t> matches;
  if (!addr.department_tokens.empty()) {
    t.find_matches(addr.department_tokens, true, matches);
    if (pick_longest(t, matches, min_occurrences,
                     [](OrgKind k) { return k == OrgKind::system_member; }, result))
      return result;
  }
  matches.clear();
  t.find_matches(addr.org_tokens, false, matches);
  if (pick_longest(t, matches, min_occurrences, [](OrgKind k) { return k == OrgKind::university; },
                   result))
    return result;
  pick_longest(t, matches, min_occurrences, [](OrgKind k) { return k == OrgKind::hospital; }, result);
  return result;
}

// ---------------------------------------------------------------------------
// Assignment table

AssignmentTable::AssignmentTable(std::size_t n_publications, std::size_t n_institutions,
                                 std::vector<AssignmentLink> links)
    : links_(std::move(links)) {
  std::sort(links_.begin(), links_.end(), [](const AssignmentLink& a, const AssignmentLink& b) {
    return a.publication != b.publication ? a.publication < b.publication
                                          : a.institution < b.institution;
  });
  pub_offsets_.assign(n_publications + 1, 0);
  inst_offsets_.assign(n_institutions + 1, 0);
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& l = links_[i];
    if (l.publication >= n_publications || l.institution >= n_institutions)
      throw Error("assignment", "link index out of range");
    if (i > 0 && links_[i - 1].publication == l.publication &&
        links_[i - 1].institution == l.institution)
      throw Error("assignment", "duplicate publication-institution link");
    ++pub_offsets_[l.publication + 1];
    ++inst_offsets_[l.institution + 1];
  }
  for (std::size_t i = 1; i < pub_offsets_.size(); ++i) pub_offsets_[i] += pub_offsets_[i - 1];
  for (std::size_t i = 1; i < inst_offsets_.size(); ++i) inst_offsets_[i] += inst_offsets_[i - 1];
  by_inst_.resize(links_.size());
  std::vector<std::size_t> cursor(inst_offsets_.begin(), inst_offsets_.end() - 1);
  for (std::size_t i = 0; i < links_.size(); ++i) by_inst_[cursor[links_[i].institution]++] = i;
}

std::span<const AssignmentLink> AssignmentTable::for_publication(PubIndex p) const {
  if (static_cast<std::size_t>(p) + 1 >= pub_offsets_.size()) return {};
  return {links_.data() + pub_offsets_[p], pub_offsets_[p + 1] - pub_offsets_[p]};
}

std::span<const std::size_t> AssignmentTable::for_institution(InstIndex i) const {
  if (static_cast<std::size_t>(i) + 1 >= inst_offsets_.size()) return {};
  return {by_inst_.data() + inst_offsets_[i], inst_offsets_[i + 1] - inst_offsets_[i]};
}

const AssignmentLink* AssignmentTable::find(PubIndex p, InstIndex i) const {
  for (const auto& l : for_publication(p))
    if (l.institution == i) return &l;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Round two

std::size_t AuthorNameHash::operator()(const AuthorName& a) const noexcept {
  return static_cast<std::size_t>(fnv1a64(a.initials, fnv1a64(a.last_name) ^ 0x1fULL));
}

AuthorIndex::AuthorIndex(const Corpus& corpus, int year_min, int year_max) {
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus[i];
    if (p.year < year_min || p.year > year_max) continue;
    for (const auto& a : p.authors) {
      auto& list = pubs_[a];
      if (list.empty() || list.back() != i) list.push_back(static_cast<PubIndex>(i));
    }
  }
}

AuthorIndex::AuthorIndex(const Corpus& corpus, int year_min, int year_max,
                         std::span<const AuthorName> authors) {
  for (const auto& a : authors) pubs_.try_emplace(a);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& p = corpus[i];
    if (p.year < year_min || p.year > year_max) continue;
    for (const auto& a : p.authors) {
      const auto it = pubs_.find(a);
      if (it == pubs_.end()) continue;
      auto& list = it->second;
      if (list.empty() || list.back() != i) list.push_back(static_cast<PubIndex>(i));
    }
  }
}

std::span<const PubIndex> AuthorIndex::publications(const AuthorName& a) const {
  const auto it = pubs_.find(a);
  if (it == pubs_.end()) return {};
  return it->second;
}

LinkStrength author_link_strength(const AuthorName& author, InstIndex inst,
                                  const AuthorIndex& authors, const AssignmentTable& partial) {
  LinkStrength s;
  for (const PubIndex p : authors.publications(author)) {
    ++s.total;
    const AssignmentLink* l = partial.find(p, inst);
    if (l != nullptr && l->round == Round::one) ++s.linked;
  }
  return s;
}

std::vector<InstIndex> match_round2(PubIndex p, const Corpus& corpus, const AuthorIndex& authors,
                                    const AssignmentTable& partial, double threshold) {
  std::vector<InstIndex> out;
  for (const auto& author : corpus[p].authors) {
    const auto pubs = authors.publications(author);
    if (pubs.empty()) continue;
    std::vector<InstIndex> candidates;
    for (const PubIndex q : pubs)
      for (const auto& l : partial.for_publication(q))
        if (l.round == Round::one) candidates.push_back(l.institution);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (const InstIndex inst : candidates) {
      const AssignmentLink* existing = partial.find(p, inst);
      if (existing != nullptr && existing->round == Round::one) continue;
      if (author_link_strength(author, inst, authors, partial).at_least(threshold)) out.push_back(inst);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ValidationReport::unmatched_rate() const {
  if (addresses == 0) return 0.0;
  return static_cast<double>(unmatched_addresses + ambiguous.size()) / static_cast<double>(addresses);
}

void write_validation_report(const ValidationReport& r, std::ostream& out) {
  out << "metric\tvalue\n";
  out << "publications\t" << r.publications << '\n';
  out << "addresses\t" << r.addresses << '\n';
  out << "matched_addresses\t" << r.matched_addresses << '\n';
  out << "hospital_addresses\t" << r.hospital_addresses << '\n';
  out << "unmatched_addresses\t" << r.unmatched_addresses << '\n';
  out << "ambiguous_addresses\t" << r.ambiguous.size() << '\n';
  out << "unmatched_rate\t" << fmt::format("{:.6f}", r.unmatched_rate()) << '\n';
  out << "hospital_publications\t" << r.hospital_publications << '\n';
  out << "hospital_publications_linked\t" << r.hospital_publications_linked << '\n';
  out << "unassigned_publications\t" << r.unassigned_publications << '\n';
  out << "round_one_links\t" << r.round_one_links << '\n';
  out << "round_two_links\t" << r.round_two_links << '\n';
  for (const auto& a : r.ambiguous)
    out << "ambiguous\t" << a.publication_id << '#' << a.address_index << '\t' << join(a.candidates, ",")
        << '\n';
}

AssignmentResult assign_corpus(const Corpus& corpus, const Thesaurus& t, const AssignmentConfig& cfg) {
  const std::size_t n = corpus.size();
  const std::size_t n_inst = t.institutions().size();

  struct PubRound1 {
    std::vector<AssignmentLink> links;
    std::uint32_t hospital_addresses = 0;
    std::uint32_t matched = 0;
    std::uint32_t unmatched = 0;
    std::vector<AmbiguousAddress> ambiguous;
  };
  std::vector<PubRound1> per_pub(n);
  parallel_for(n, [&](std::size_t i) {
    const auto& p = corpus[i];
    auto& out = per_pub[i];
    for (std::size_t a = 0; a < p.addresses.size(); ++a) {
      const Round1Match m = match_round1(p.addresses[a], t, cfg.min_occurrences);
      if (m.ambiguous) {
        out.ambiguous.push_back({p.id, a, m.candidates});
        continue;
      }
      if (!m) {
        ++out.unmatched;
        continue;
      }
      if (m.kind == OrgKind::hospital) {
        ++out.hospital_addresses;
        continue;
      }
      ++out.matched;
      const InstIndex inst = *t.find_institution(*m.org_id);
      auto it = std::find_if(out.links.begin(), out.links.end(),
                             [&](const AssignmentLink& l) { return l.institution == inst; });
      if (it == out.links.end())
        out.links.push_back({static_cast<PubIndex>(i), inst, 1, Round::one, 1});
      else
        ++it->matched_address_count;
    }
  });

  AssignmentResult result;
  ValidationReport& rep = result.report;
  rep.publications = n;
  std::vector<AssignmentLink> links;
  std::vector<PubIndex> hospital_pubs;
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = per_pub[i];
    rep.addresses += corpus[i].addresses.size();
    rep.matched_addresses += r.matched;
    rep.hospital_addresses += r.hospital_addresses;
    rep.unmatched_addresses += r.unmatched;
    for (auto& a : r.ambiguous) rep.ambiguous.push_back(std::move(a));
    if (r.hospital_addresses > 0) hospital_pubs.push_back(static_cast<PubIndex>(i));
    links.insert(links.end(), r.links.begin(), r.links.end());
  }
  rep.round_one_links = links.size();
  rep.hospital_publications = hospital_pubs.size();

  AssignmentTable round_one(n, n_inst, links);

  std::vector<AuthorName> hospital_authors;
  for (const PubIndex p : hospital_pubs)
    for (const auto& a : corpus[p].authors) hospital_authors.push_back(a);
  std::sort(hospital_authors.begin(), hospital_authors.end());
  hospital_authors.erase(std::unique(hospital_authors.begin(), hospital_authors.end()),
                         hospital_authors.end());
  const AuthorIndex authors(corpus, cfg.year_min, cfg.year_max, hospital_authors);

  std::vector<std::vector<InstIndex>> round_two(hospital_pubs.size());
  parallel_for(hospital_pubs.size(), [&](std::size_t k) {
    round_two[k] = match_round2(hospital_pubs[k], corpus, authors, round_one, cfg.link_threshold);
  });
  for (std::size_t k = 0; k < hospital_pubs.size(); ++k) {
    const PubIndex p = hospital_pubs[k];
    const auto& insts = round_two[k];
    if (insts.empty()) continue;
    ++rep.hospital_publications_linked;
    for (const InstIndex inst : insts)
      links.push_back({p, inst, per_pub[p].hospital_addresses, Round::two,
                       static_cast<std::uint32_t>(insts.size())});
    rep.round_two_links += insts.size();
  }

  result.table = AssignmentTable(n, n_inst, std::move(links));
  for (std::size_t i = 0; i < n; ++i)
    if (result.table.for_publication(static_cast<PubIndex>(i)).empty()) ++rep.unassigned_publications;
  return result;
}

void write_assignment_table(const AssignmentTable& table, const Corpus& corpus, const Thesaurus& t,
                            std::ostream& out) {
  out << "publication_id\tinstitution_id\tmatched_address_count\tround\n";
  for (const auto& l : table.links())
    out << corpus[l.publication].id << '\t' << t.institution(l.institution).id << '\t'
        << l.matched_address_count << '\t' << (l.round == Round::one ? "one" : "two") << '\n';
}

}  // namespace leiden
