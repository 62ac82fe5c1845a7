#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace leiden {

enum class DocType : std::uint8_t { article, review, letter };

std::string_view to_string(DocType t);
std::optional<DocType> parse_doc_type(std::string_view s);

/// Normalized author key used for self-citation detection.
struct AuthorName {
  std::string last_name;
  std::string initials;

  auto operator<=>(const AuthorName&) const = default;
};

/// Builds an AuthorName from raw text: case-folded, diacritics stripped,
/// punctuation removed. Last-name tokens are joined with a space, initials are
/// concatenated ("J.-P." -> "jp").
AuthorName make_author_name(std::string_view last_name, std::string_view initials);

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool operator==(const GeoPoint&) const = default;
};

bool valid_coordinates(const GeoPoint& g);

struct Address {
  std::string raw;  // organization text as supplied
  std::vector<std::string> org_tokens;
  std::string city;
  std::string country;  // upper-case code, may be empty
  std::string department;
  std::vector<std::string> department_tokens;
  std::optional<GeoPoint> geo;

  bool operator==(const Address&) const = default;
};

/// Key used by the geo table: organization tokens followed by city tokens.
std::string address_key(const Address& a);
std::string address_key(const std::vector<std::string>& org_tokens, std::string_view city);

struct FieldShare {
  std::string label;
  double fraction = 1.0;

  bool operator==(const FieldShare&) const = default;
};

struct Publication {
  std::string id;
  int year = 0;
  DocType doc_type = DocType::article;
  std::string language;  // lower-case ISO-639-1
  std::vector<FieldShare> fields;
  bool is_arts_humanities = false;
  std::vector<AuthorName> authors;
  std::vector<Address> addresses;

  bool operator==(const Publication&) const = default;
};

using PubIndex = std::uint32_t;

/// Immutable, id-indexed set of publications.
class Corpus {
 public:
  Corpus() = default;
  /// Throws Error("ingest") on duplicate ids.
  explicit Corpus(std::vector<Publication> pubs);

  std::size_t size() const noexcept { return pubs_.size(); }
  bool empty() const noexcept { return pubs_.empty(); }
  const Publication& operator[](std::size_t i) const { return pubs_[i]; }
  const std::vector<Publication>& publications() const noexcept { return pubs_; }
  auto begin() const { return pubs_.begin(); }
  auto end() const { return pubs_.end(); }

  std::optional<PubIndex> find(std::string_view id) const;

  bool operator==(const Corpus& other) const { return pubs_ == other.pubs_; }

 private:
  std::vector<Publication> pubs_;
  std::unordered_map<std::string, PubIndex> index_;
};

struct Rejection {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct RejectionReport {
  std::vector<Rejection> entries;

  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }
};

struct IngestResult {
  Corpus corpus;
  RejectionReport rejections;
  std::size_t lines = 0;  // non-blank input lines
};

/// Parses JSON-lines publication records (docs/format.md). Blank lines are
/// skipped; every other line is either accepted or listed in the rejection
/// report with its line number.
IngestResult parse_corpus(std::string_view text);
IngestResult parse_corpus(std::istream& in);
/// Throws Error("ingest") when the file cannot be read.
IngestResult parse_corpus_file(const std::filesystem::path& path);

/// One JSON line, without the trailing newline. Parsing it back yields an
/// equal Publication.
std::string serialize_publication(const Publication& p);
void write_corpus(const Corpus& corpus, std::ostream& out);

struct InclusionConfig {
  int year_min = 2005;
  int year_max = 2009;
  int citation_window_end = 2010;
  bool english_only = true;
  bool exclude_self_citations = true;
  double letter_weight = 0.25;

  /// Throws Error("config") when the invariants do not hold.
  void validate() const;
};

/// 0 outside the year window, for arts-and-humanities records and (when
/// english_only) for non-English records; letter_weight for letters; else 1.
double inclusion_weight(const Publication& p, const InclusionConfig& cfg);

/// Directed citing -> cited edges stored by cited publication.
class CitationGraph {
 public:
  CitationGraph() = default;
  /// Edges are (citing, cited) corpus indices; duplicates must already be removed.
  CitationGraph(std::size_t n_publications, std::span<const std::pair<PubIndex, PubIndex>> edges);

  std::span<const PubIndex> citing(PubIndex cited) const;
  std::size_t edge_count() const noexcept { return citing_.size(); }
  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<PubIndex> citing_;
};

struct GraphLoadResult {
  CitationGraph graph;
  RejectionReport rejections;
};

/// Two-column (citing_id, cited_id) file, tab or comma separated, optional
/// header. Unknown ids, self edges and duplicate edges are rejected with
/// their line numbers.
GraphLoadResult load_citations(std::string_view text, const Corpus& corpus);
GraphLoadResult load_citations_file(const std::filesystem::path& path, const Corpus& corpus);

/// True when the two author lists share at least one (last name, initials) key.
bool shares_author(const Publication& a, const Publication& b);

std::uint32_t countable_citations(PubIndex p, const Corpus& corpus, const CitationGraph& g,
                                  const InclusionConfig& cfg);

/// countable_citations for every publication.
std::vector<std::uint32_t> countable_citation_counts(const Corpus& corpus, const CitationGraph& g,
                                                     const InclusionConfig& cfg);

}  // namespace leiden
