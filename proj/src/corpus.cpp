#include "leiden/corpus.hpp"

#include <rapidjson/document.h>
#include <rapidjson/stringbuffer.h>
#include <rapidjson/writer.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include "leiden/error.hpp"
#include "leiden/parallel.hpp"
#include "leiden/text.hpp"

namespace leiden {

std::string_view to_string(DocType t) {
  switch (t) {
    case DocType::article:
      return "article";
    case DocType::review:
      return "review";
    case DocType::letter:
      return "letter";
  }
  return "article";
}

std::optional<DocType> parse_doc_type(std::string_view s) {
  if (s == "article") return DocType::article;
  if (s == "review") return DocType::review;
  if (s == "letter") return DocType::letter;
  return std::nullopt;
}

AuthorName make_author_name(std::string_view last_name, std::string_view initials) {
  AuthorName a;
  a.last_name = fold_text(last_name);
  for (const auto& tok : fold_tokens(initials)) a.initials += tok;
  return a;
}

bool valid_coordinates(const GeoPoint& g) {
  return std::isfinite(g.lat) && std::isfinite(g.lon) && g.lat >= -90.0 && g.lat <= 90.0 &&
         g.lon >= -180.0 && g.lon <= 180.0;
}

std::string address_key(const std::vector<std::string>& org_tokens, std::string_view city) {
  std::string key = join(org_tokens);
  const auto city_tokens = fold_tokens(city);
  if (!city_tokens.empty()) {
    if (!key.empty()) key.push_back(' ');
    key += join(city_tokens);
  }
  return key;
}

std::string address_key(const Address& a) { return address_key(a.org_tokens, a.city); }

Corpus::Corpus(std::vector<Publication> pubs) : pubs_(std::move(pubs)) {
  index_.reserve(pubs_.size());
  for (std::size_t i = 0; i < pubs_.size(); ++i) {
    if (!index_.emplace(pubs_[i].id, static_cast<PubIndex>(i)).second)
      throw Error("ingest", "duplicate publication id '" + pubs_[i].id + "'");
  }
}

std::optional<PubIndex> Corpus::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Record parsing

namespace {

using JsonDoc = rapidjson::GenericDocument<rapidjson::UTF8<>, rapidjson::MemoryPoolAllocator<>,
                                           rapidjson::MemoryPoolAllocator<>>;
using JsonValue = JsonDoc::ValueType;

constexpr unsigned kParseFlags =
    rapidjson::kParseValidateEncodingFlag | rapidjson::kParseFullPrecisionFlag;

struct RecordError {
  std::string reason;
};

const JsonValue* member(const JsonValue& obj, const char* name) {
  const auto it = obj.FindMember(name);
  return it == obj.MemberEnd() ? nullptr : &it->value;
}

std::string string_member(const JsonValue& obj, const char* name, bool required) {
  const JsonValue* v = member(obj, name);
  if (v == nullptr || v->IsNull()) {
    if (required) throw RecordError{std::string("missing ") + name};
    return {};
  }
  if (!v->IsString()) throw RecordError{std::string("invalid ") + name};
  return std::string(v->GetString(), v->GetStringLength());
}

std::vector<FieldShare> parse_fields(const JsonValue* v) {
  if (v == nullptr || !v->IsArray() || v->Empty()) throw RecordError{"missing fields"};
  std::vector<FieldShare> fields;
  bool any_string = false;
  bool any_object = false;
  for (const auto& f : v->GetArray()) {
    FieldShare share;
    if (f.IsString()) {
      any_string = true;
      share.label = std::string(trim(std::string_view(f.GetString(), f.GetStringLength())));
    } else if (f.IsObject()) {
      any_object = true;
      share.label = std::string(trim(string_member(f, "label", true)));
      const JsonValue* frac = member(f, "fraction");
      if (frac == nullptr || !frac->IsNumber()) throw RecordError{"invalid field fraction"};
      share.fraction = frac->GetDouble();
      if (!(share.fraction > 0.0 && share.fraction <= 1.0))
        throw RecordError{"invalid field fraction"};
    } else {
      throw RecordError{"invalid fields"};
    }
    if (share.label.empty()) throw RecordError{"empty field label"};
    fields.push_back(std::move(share));
  }
  if (any_string && any_object) throw RecordError{"mixed field forms"};
  for (std::size_t i = 0; i < fields.size(); ++i)
    for (std::size_t j = i + 1; j < fields.size(); ++j)
      if (fields[i].label == fields[j].label) throw RecordError{"duplicate field label"};
  if (any_string) {
    const double share = 1.0 / static_cast<double>(fields.size());
    for (auto& f : fields) f.fraction = share;
  } else {
    double total = 0.0;
    for (const auto& f : fields) total += f.fraction;
    if (std::abs(total - 1.0) > 1e-12) throw RecordError{"field fractions do not sum to 1"};
  }
  return fields;
}

Address parse_address(const JsonValue& a) {
  if (!a.IsObject()) throw RecordError{"invalid address"};
  Address addr;
  addr.raw = string_member(a, "org", true);
  addr.org_tokens = fold_tokens(addr.raw);
  addr.city = string_member(a, "city", false);
  addr.country = std::string(trim(string_member(a, "country", false)));
  for (char& c : addr.country)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  addr.department = string_member(a, "department", false);
  addr.department_tokens = fold_tokens(addr.department);
  const JsonValue* lat = member(a, "lat");
  const JsonValue* lon = member(a, "lon");
  const bool has_lat = lat != nullptr && !lat->IsNull();
  const bool has_lon = lon != nullptr && !lon->IsNull();
  if (has_lat != has_lon) throw RecordError{"incomplete coordinates"};
  if (has_lat) {
    if (!lat->IsNumber() || !lon->IsNumber()) throw RecordError{"invalid coordinates"};
    GeoPoint g{lat->GetDouble(), lon->GetDouble()};
    if (!valid_coordinates(g)) throw RecordError{"coordinates out of range"};
    addr.geo = g;
  }
  return addr;
}

Publication parse_record(const char* data, std::size_t len) {
  char value_buffer[16384];
  char parse_buffer[2048];
  rapidjson::MemoryPoolAllocator<> value_alloc(value_buffer, sizeof value_buffer);
  rapidjson::MemoryPoolAllocator<> parse_alloc(parse_buffer, sizeof parse_buffer);
  JsonDoc doc(&value_alloc, sizeof parse_buffer, &parse_alloc);
  doc.Parse<kParseFlags>(data, len);
  if (doc.HasParseError()) throw RecordError{"invalid json"};
  if (!doc.IsObject()) throw RecordError{"record is not an object"};

  Publication p;
  p.id = std::string(trim(string_member(doc, "id", true)));
  if (p.id.empty()) throw RecordError{"missing id"};

  const JsonValue* year = member(doc, "year");
  if (year == nullptr || !year->IsInt()) throw RecordError{"invalid year"};
  p.year = year->GetInt();

  const auto doc_type = parse_doc_type(string_member(doc, "doc_type", true));
  if (!doc_type) throw RecordError{"unknown doc_type"};
  p.doc_type = *doc_type;

  p.language = std::string(trim(string_member(doc, "language", true)));
  for (char& c : p.language)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (p.language.empty()) throw RecordError{"missing language"};

  if (const JsonValue* ah = member(doc, "arts_humanities"); ah != nullptr && !ah->IsNull()) {
    if (!ah->IsBool()) throw RecordError{"invalid arts_humanities"};
    p.is_arts_humanities = ah->GetBool();
  }

  p.fields = parse_fields(member(doc, "fields"));

  if (const JsonValue* authors = member(doc, "authors"); authors != nullptr && !authors->IsNull()) {
    if (!authors->IsArray()) throw RecordError{"invalid authors"};
    for (const auto& a : authors->GetArray()) {
      if (!a.IsObject()) throw RecordError{"invalid author"};
      AuthorName name = make_author_name(string_member(a, "last", true), string_member(a, "initials", false));
      if (name.last_name.empty()) throw RecordError{"empty author last name"};
      p.authors.push_back(std::move(name));
    }
  }

  if (const JsonValue* addrs = member(doc, "addresses"); addrs != nullptr && !addrs->IsNull()) {
    if (!addrs->IsArray()) throw RecordError{"invalid addresses"};
    for (const auto& a : addrs->GetArray()) p.addresses.push_back(parse_address(a));
  }
  return p;
}

struct LineRef {
  std::size_t line;
  std::string_view text;
};

std::string read_stream(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error("ingest", "failed to read input stream");
  return std::move(ss).str();
}

}  // namespace

IngestResult parse_corpus(std::string_view text) {
  std::vector<LineRef> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const auto line = trim(text.substr(pos, nl - pos));
    if (!line.empty()) lines.push_back({line_no, line});
    pos = nl + 1;
  }

  struct Parsed {
    std::optional<Publication> pub;
    std::string reason;
  };
  std::vector<Parsed> parsed(lines.size());
  parallel_for(lines.size(), [&](std::size_t i) {
    try {
      parsed[i].pub = parse_record(lines[i].text.data(), lines[i].text.size());
    } catch (const RecordError& e) {
      parsed[i].reason = e.reason;
    }
  });

  IngestResult result;
  result.lines = lines.size();
  std::vector<Publication> pubs;
  pubs.reserve(lines.size());
  std::unordered_set<std::string> seen;
  seen.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!parsed[i].pub) {
      result.rejections.entries.push_back({lines[i].line, parsed[i].reason});
      continue;
    }
    if (!seen.insert(parsed[i].pub->id).second) {
      result.rejections.entries.push_back({lines[i].line, "duplicate id"});
      continue;
    }
    pubs.push_back(std::move(*parsed[i].pub));
  }
  result.corpus = Corpus(std::move(pubs));
  return result;
}

IngestResult parse_corpus(std::istream& in) {
  const std::string text = read_stream(in);
  return parse_corpus(std::string_view(text));
}

IngestResult parse_corpus_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("ingest", "cannot open publications file '" + path.string() + "'");
  return parse_corpus(in);
}

std::string serialize_publication(const Publication& p) {
  rapidjson::StringBuffer buf;
  rapidjson::Writer<rapidjson::StringBuffer> w(buf);
  auto str = [&](std::string_view s) { w.String(s.data(), static_cast<rapidjson::SizeType>(s.size())); };
  w.StartObject();
  w.Key("id");
  str(p.id);
  w.Key("year");
  w.Int(p.year);
  w.Key("doc_type");
  str(to_string(p.doc_type));
  w.Key("language");
  str(p.language);
  w.Key("arts_humanities");
  w.Bool(p.is_arts_humanities);
  w.Key("fields");
  w.StartArray();
  const double equal = 1.0 / static_cast<double>(p.fields.size());
  bool all_equal = true;
  for (const auto& f : p.fields) all_equal = all_equal && f.fraction == equal;
  for (const auto& f : p.fields) {
    if (all_equal) {
      str(f.label);
    } else {
      w.StartObject();
      w.Key("label");
      str(f.label);
      w.Key("fraction");
      w.Double(f.fraction);
      w.EndObject();
    }
  }
  w.EndArray();
  w.Key("authors");
  w.StartArray();
  for (const auto& a : p.authors) {
    w.StartObject();
    w.Key("last");
    str(a.last_name);
    w.Key("initials");
    str(a.initials);
    w.EndObject();
  }
  w.EndArray();
  w.Key("addresses");
  w.StartArray();
  for (const auto& a : p.addresses) {
    w.StartObject();
    w.Key("org");
    str(a.raw);
    if (!a.city.empty()) {
      w.Key("city");
      str(a.city);
    }
    if (!a.country.empty()) {
      w.Key("country");
      str(a.country);
    }
    if (!a.department.empty()) {
      w.Key("department");
      str(a.department);
    }
    if (a.geo) {
      w.Key("lat");
      w.Double(a.geo->lat);
      w.Key("lon");
      w.Double(a.geo->lon);
    }
    w.EndObject();
  }
  w.EndArray();
  w.EndObject();
  return std::string(buf.GetString(), buf.GetSize());
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& p : corpus) out << serialize_publication(p) << '\n';
}

void InclusionConfig::validate() const {
  if (year_min > year_max) throw Error("config", "year_min exceeds year_max");
  if (!(letter_weight > 0.0 && letter_weight <= 1.0))
    throw Error("config", "letter weight must lie in (0, 1]");
}

double inclusion_weight(const Publication& p, const InclusionConfig& cfg) {
  if (p.year < cfg.year_min || p.year > cfg.year_max) return 0.0;
  if (p.is_arts_humanities) return 0.0;
  if (cfg.english_only && p.language != "en") return 0.0;
  return p.doc_type == DocType::letter ? cfg.letter_weight : 1.0;
}

// ---------------------------------------------------------------------------
// Citation graph

CitationGraph::CitationGraph(std::size_t n_publications,
                             std::span<const std::pair<PubIndex, PubIndex>> edges)
    : offsets_(n_publications + 1, 0), citing_(edges.size()) {
  for (const auto& [citing, cited] : edges) ++offsets_[cited + 1];
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [citing, cited] : edges) citing_[cursor[cited]++] = citing;
}

std::span<const PubIndex> CitationGraph::citing(PubIndex cited) const {
  if (static_cast<std::size_t>(cited) + 1 >= offsets_.size()) return {};
  return {citing_.data() + offsets_[cited], offsets_[cited + 1] - offsets_[cited]};
}

GraphLoadResult load_citations(std::string_view text, const Corpus& corpus) {
  GraphLoadResult result;
  std::vector<std::pair<PubIndex, PubIndex>> edges;
  std::unordered_set<std::uint64_t> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty()) continue;
    const char delim = line.find('\t') != std::string_view::npos ? '\t' : ',';
    const auto cols = split(line, delim);
    if (cols.size() != 2) {
      result.rejections.entries.push_back({line_no, "expected two columns"});
      first = false;
      continue;
    }
    const auto citing_id = trim(cols[0]);
    const auto cited_id = trim(cols[1]);
    if (first && citing_id == "citing_id" && cited_id == "cited_id") {
      first = false;
      continue;
    }
    first = false;
    const auto citing = corpus.find(citing_id);
    const auto cited = corpus.find(cited_id);
    if (!citing || !cited) {
      result.rejections.entries.push_back({line_no, "unknown publication id"});
      continue;
    }
    if (*citing == *cited) {
      result.rejections.entries.push_back({line_no, "self edge"});
      continue;
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(*citing) << 32) | *cited;
    if (!seen.insert(key).second) {
      result.rejections.entries.push_back({line_no, "duplicate edge"});
      continue;
    }
    edges.emplace_back(*citing, *cited);
  }
  result.graph = CitationGraph(corpus.size(), edges);
  return result;
}

GraphLoadResult load_citations_file(const std::filesystem::path& path, const Corpus& corpus) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("citations", "cannot open citations file '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_citations(text, corpus);
}

bool shares_author(const Publication& a, const Publication& b) {
  for (const auto& x : a.authors)
    for (const auto& y : b.authors)
      if (x == y) return true;
  return false;
}

std::uint32_t countable_citations(PubIndex p, const Corpus& corpus, const CitationGraph& g,
                                  const InclusionConfig& cfg) {
  std::uint32_t count = 0;
  const Publication& cited = corpus[p];
  for (const PubIndex c : g.citing(p)) {
    const Publication& citing = corpus[c];
    if (citing.year > cfg.citation_window_end) continue;
    if (cfg.exclude_self_citations && shares_author(citing, cited)) continue;
    ++count;
  }
  return count;
}

std::vector<std::uint32_t> countable_citation_counts(const Corpus& corpus, const CitationGraph& g,
                                                     const InclusionConfig& cfg) {
  std::vector<std::uint32_t> counts(corpus.size(), 0);
  parallel_for(corpus.size(), [&](std::size_t i) {
    counts[i] = countable_citations(static_cast<PubIndex>(i), corpus, g, cfg);
  });
  return counts;
}

}  // namespace leiden
