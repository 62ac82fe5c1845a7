#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "leiden/corpus.hpp"

namespace leiden {

/// Organization-name normalization used for thesaurus variants and address
/// matching: case-folded, diacritics stripped, punctuation collapsed.
std::vector<std::string> normalize_org_name(std::string_view raw);

enum class OrgKind : std::uint8_t {
  university,     // variant matched against the organization text
  hospital,       // organization handled by the author-link round
  system_member,  // constituent of a university system, matched on the department text
};

std::string_view to_string(OrgKind k);
std::optional<OrgKind> parse_org_kind(std::string_view s);

struct ThesaurusEntry {
  std::vector<std::string> variant_tokens;
  std::string institution_id;
  int occurrence_count = 1;
  OrgKind kind = OrgKind::university;
};

struct Institution {
  std::string id;
  std::string name;
  std::string country;
};

using InstIndex = std::uint32_t;

/// Name-variant thesaurus plus the list of rankable institutions. University
/// and system-member entries must reference a listed institution; hospital
/// entries carry their own organization ids.
class Thesaurus {
 public:
  Thesaurus() = default;
  /// Throws Error("thesaurus") on duplicate variants, counts below one,
  /// empty variants or unknown institution references.
  Thesaurus(std::vector<ThesaurusEntry> entries, std::vector<Institution> institutions);

  const std::vector<ThesaurusEntry>& entries() const noexcept { return entries_; }
  const std::vector<Institution>& institutions() const noexcept { return institutions_; }
  std::optional<InstIndex> find_institution(std::string_view id) const;
  const Institution& institution(InstIndex i) const { return institutions_[i]; }
  bool is_hospital(std::string_view org_id) const;

  /// Entries whose variant occurs as a contiguous token run in `tokens`,
  /// restricted to the given matching domain (department text for
  /// system members, organization text otherwise).
  void find_matches(std::span<const std::string> tokens, bool department_domain,
                    std::vector<std::size_t>& out) const;

 private:
  struct Domain {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;
    std::size_t max_len = 0;
  };

  std::vector<ThesaurusEntry> entries_;
  std::vector<Institution> institutions_;
  std::unordered_map<std::string, InstIndex> inst_index_;
  std::unordered_map<std::string, bool> hospitals_;
  Domain org_domain_;
  Domain department_domain_;
};

/// Thesaurus file: tab-separated variant, institution_id, occurrence_count,
/// kind. Institutions file: tab-separated id, name, country. Lines starting
/// with '#' and a leading header row are skipped.
Thesaurus load_thesaurus(std::string_view thesaurus_text, std::string_view institutions_text);
Thesaurus load_thesaurus_files(const std::filesystem::path& thesaurus,
                               const std::filesystem::path& institutions);

struct Round1Match {
  std::optional<std::string> org_id;  // institution id, or hospital id for hospital matches
  OrgKind kind = OrgKind::university;
  bool ambiguous = false;
  std::vector<std::string> candidates;  // filled when ambiguous

  explicit operator bool() const noexcept { return org_id.has_value(); }
};

/// Round-one address matching. System-member variants on the department text
/// are tried first, then university variants, then hospital variants; within
/// each tier the longest matching variant wins. Variants with fewer than
/// `min_occurrences` occurrences are ignored. Two distinct organizations tied
/// at the winning length leave the address unassigned and ambiguous.
Round1Match match_round1(const Address& addr, const Thesaurus& t, int min_occurrences = 5);

enum class Round : std::uint8_t { one, two };

struct AssignmentLink {
  PubIndex publication = 0;
  InstIndex institution = 0;
  std::uint32_t matched_address_count = 0;
  Round round = Round::one;
  // Round-two links split their hospital addresses among this many
  // institutions; always 1 for round-one links.
  std::uint32_t share_divisor = 1;

  bool operator==(const AssignmentLink&) const = default;
};

/// Publication-institution links ordered by (publication, institution).
class AssignmentTable {
 public:
  AssignmentTable() = default;
  /// Sorts the links; throws Error("assignment") on a duplicate pair.
  AssignmentTable(std::size_t n_publications, std::size_t n_institutions,
                  std::vector<AssignmentLink> links);

  const std::vector<AssignmentLink>& links() const noexcept { return links_; }
  std::span<const AssignmentLink> for_publication(PubIndex p) const;
  /// Indices into links() for one institution, in publication order.
  std::span<const std::size_t> for_institution(InstIndex i) const;
  const AssignmentLink* find(PubIndex p, InstIndex i) const;
  std::size_t institution_count() const noexcept {
    return inst_offsets_.empty() ? 0 : inst_offsets_.size() - 1;
  }

  bool operator==(const AssignmentTable& o) const { return links_ == o.links_; }

 private:
  std::vector<AssignmentLink> links_;
  std::vector<std::size_t> pub_offsets_;
  std::vector<std::size_t> inst_offsets_;
  std::vector<std::size_t> by_inst_;
};

/// Exact ratio of two counts.
struct LinkStrength {
  std::uint32_t linked = 0;
  std::uint32_t total = 0;

  double value() const { return total == 0 ? 0.0 : static_cast<double>(linked) / total; }
  bool at_least(double threshold) const {
    return total != 0 && static_cast<double>(linked) / static_cast<double>(total) >= threshold;
  }
};

struct AuthorNameHash {
  std::size_t operator()(const AuthorName& a) const noexcept;
};

/// Publications per author, restricted to a year window.
class AuthorIndex {
 public:
  AuthorIndex(const Corpus& corpus, int year_min, int year_max);
  /// Indexes only the given authors.
  AuthorIndex(const Corpus& corpus, int year_min, int year_max, std::span<const AuthorName> authors);

  std::span<const PubIndex> publications(const AuthorName& a) const;

 private:
  std::unordered_map<AuthorName, std::vector<PubIndex>, AuthorNameHash> pubs_;
};

/// Share of the author's publications that carry a round-one link to `inst`.
LinkStrength author_link_strength(const AuthorName& author, InstIndex inst,
                                  const AuthorIndex& authors, const AssignmentTable& partial);

/// Round-two institutions for publication `p`: every institution to which
/// some author has strength >= threshold and that `p` is not already linked
/// to in round one. Returned sorted and unique.
std::vector<InstIndex> match_round2(PubIndex p, const Corpus& corpus, const AuthorIndex& authors,
                                    const AssignmentTable& partial, double threshold = 0.5);

struct AmbiguousAddress {
  std::string publication_id;
  std::size_t address_index = 0;
  std::vector<std::string> candidates;
};

struct ValidationReport {
  std::size_t publications = 0;
  std::size_t addresses = 0;
  std::size_t matched_addresses = 0;   // university or system-member match
  std::size_t hospital_addresses = 0;
  std::size_t unmatched_addresses = 0;
  std::size_t hospital_publications = 0;
  std::size_t hospital_publications_linked = 0;  // gained at least one round-two link
  std::size_t unassigned_publications = 0;       // no link at all
  std::size_t round_one_links = 0;
  std::size_t round_two_links = 0;
  std::vector<AmbiguousAddress> ambiguous;

  /// Unmatched plus ambiguous addresses over all addresses.
  double unmatched_rate() const;
};

void write_validation_report(const ValidationReport& r, std::ostream& out);

struct AssignmentConfig {
  int min_occurrences = 5;
  double link_threshold = 0.5;
  int year_min = 2005;  // window for author publication counts
  int year_max = 2009;
};

struct AssignmentResult {
  AssignmentTable table;
  ValidationReport report;
};

/// Round one over every address, then round two over hospital publications.
AssignmentResult assign_corpus(const Corpus& corpus, const Thesaurus& t, const AssignmentConfig& cfg);

/// Tab-separated publication_id, institution_id, matched_address_count, round.
void write_assignment_table(const AssignmentTable& table, const Corpus& corpus, const Thesaurus& t,
                            std::ostream& out);

}  // namespace leiden
