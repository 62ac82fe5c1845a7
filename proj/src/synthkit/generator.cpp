#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <unordered_set>

#include <fmt/format.h>

#include "leiden/error.hpp"
#include "leiden/synthkit.hpp"
#include "leiden/text.hpp"

namespace leiden::synth {

void Params::validate() const {
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error("synthkit", fmt::format("{} must be in [0, 1]", name));
  };
  if (n_institutions < 1) throw Error("synthkit", "need at least one institution");
  if (n_publications < n_institutions) throw Error("synthkit", "fewer publications than institutions");
  if (fields.empty()) throw Error("synthkit", "need at least one field");
  if (year_min > year_max) throw Error("synthkit", "empty year range");
  if (citation_window_end < year_max) throw Error("synthkit", "citation window ends before the year range");
  rate(collaboration_rate, "collaboration_rate");
  rate(international_rate, "international_rate");
  rate(multi_field_rate, "multi_field_rate");
  rate(letter_share, "letter_share");
  rate(review_share, "review_share");
  if (letter_share + review_share > 1.0) throw Error("synthkit", "letter and review shares exceed 1");
  rate(non_english_share, "non_english_share");
  rate(arts_humanities_share, "arts_humanities_share");
  rate(self_citation_bias, "self_citation_bias");
  rate(unmatchable_address_rate, "unmatchable_address_rate");
  rate(hospital_rate, "hospital_rate");
  rate(missing_geo_rate, "missing_geo_rate");
  if (!(citation_mean >= 0.0)) throw Error("synthkit", "citation_mean must be non-negative");
  if (!(dispersion > 0.0)) throw Error("synthkit", "dispersion must be positive");
  if (!(collab_citation_multiplier > 0.0)) throw Error("synthkit", "collab_citation_multiplier must be positive");
  if (outlier_count < 0) throw Error("synthkit", "negative outlier count");
  if (outlier_institution < 0 || outlier_institution >= n_institutions)
    throw Error("synthkit", "outlier_institution out of range");
  if (authors_per_institution < 1) throw Error("synthkit", "need at least one author per institution");
}

namespace {

struct Country {
  const char* code;
  double lat, lon;
};

constexpr std::array<Country, 12> kCountries{{{"US", 39.0, -98.0},
                                              {"GB", 53.0, -2.0},
                                              {"DE", 51.0, 10.0},
                                              {"FR", 46.6, 2.2},
                                              {"CN", 33.0, 110.0},
                                              {"JP", 36.0, 138.0},
                                              {"IT", 42.8, 12.5},
                                              {"CA", 50.0, -100.0},
                                              {"ES", 40.0, -4.0},
                                              {"NL", 52.1, 5.3},
                                              {"AU", -28.0, 140.0},
                                              {"BR", -12.0, -50.0}}};

constexpr std::array<const char*, 6> kDepartments{"Dept Chem", "Dept Phys", "Dept Med",
                                                  "Dept Math", "Sch Engn",  "Inst Biol"};
constexpr std::array<const char*, 4> kLanguages{"de", "fr", "es", "ja"};

// Pronounceable, collision-free name for an integer.
std::string word(std::uint64_t n, char lead) {
  static constexpr std::array<const char*, 16> kSyl{"ka", "lo", "mi", "ren", "sa", "tu", "vo", "zel",
                                                    "bra", "dun", "fi", "gor", "he", "jas", "nu", "pel"};
  std::string s(1, lead);
  do {
    s += kSyl[n % kSyl.size()];
    n /= kSyl.size();
  } while (n != 0);
  return s;
}

std::string initials_for(std::uint64_t n) {
  std::string s(1, static_cast<char>('A' + n % 26));
  if ((n / 26) % 2 == 1) s += static_cast<char>('A' + (n / 52) % 26);
  return s;
}

struct InstSpec {
  std::string word;
  std::string city;
  std::size_t country = 0;
  GeoPoint where;
  bool has_geo = true;
  std::string hospital_word;
  std::vector<AuthorName> authors;
};

class Gen {
 public:
  explicit Gen(const Params& p) : p_(p), rng_(p.seed) {}

  Bundle run();

 private:
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double r) { return r > 0.0 && uniform() < r; }

  void make_institutions();
  Address university_address(std::size_t inst, std::size_t dept);
  Address hospital_address(std::size_t inst);
  Address unmatchable_address();
  Publication base_publication(std::size_t serial, int year);
  void add_home(Publication& pub, std::size_t inst, std::vector<TruthLink>& truth,
                std::vector<std::optional<GeoPoint>>& coords);
  void add_collaborator(Publication& pub, std::size_t inst, std::vector<TruthLink>& truth,
                        std::vector<std::optional<GeoPoint>>& coords);
  std::uint32_t draw_citations(const Publication& pub, bool collaborative);
  void cite(PubIndex cited, std::uint32_t count, std::size_t population, std::mt19937_64& rng);

  const Params& p_;
  std::mt19937_64 rng_;
  std::vector<InstSpec> inst_;
  std::vector<std::vector<std::size_t>> by_country_;
  std::vector<std::pair<PubIndex, PubIndex>> edges_;
  std::vector<std::vector<PubIndex>> author_pubs_;  // per global author index
  std::vector<std::vector<std::size_t>> pub_authors_;
  std::size_t unmatchable_ = 0;
  std::size_t unmatched_serial_ = 0;
};

void Gen::make_institutions() {
  by_country_.assign(kCountries.size(), {});
  std::size_t author_serial = 0;
  for (int i = 0; i < p_.n_institutions; ++i) {
    InstSpec s;
    s.word = word(static_cast<std::uint64_t>(i), 'K');
    s.city = word(static_cast<std::uint64_t>(i), 'C') + "ville";
    s.country = static_cast<std::size_t>(i) % kCountries.size();
    const Country& c = kCountries[s.country];
    s.where = {c.lat + (uniform() - 0.5) * 6.0, c.lon + (uniform() - 0.5) * 6.0};
    s.has_geo = !chance(p_.missing_geo_rate);
    s.hospital_word = word(static_cast<std::uint64_t>(i), 'H');
    for (int a = 0; a < p_.authors_per_institution; ++a, ++author_serial)
      s.authors.push_back(make_author_name(word(author_serial, 'A'), initials_for(author_serial)));
    by_country_[s.country].push_back(inst_.size());
    inst_.push_back(std::move(s));
  }
}

Address make_address(std::string org, std::string city, std::string country, std::string dept) {
  Address a;
  a.raw = std::move(org);
  a.org_tokens = normalize_org_name(a.raw);
  a.city = std::move(city);
  a.country = std::move(country);
  a.department = std::move(dept);
  a.department_tokens = normalize_org_name(a.department);
  return a;
}

Address Gen::university_address(std::size_t inst, std::size_t dept) {
  const InstSpec& s = inst_[inst];
  static constexpr std::array<const char*, 3> kForms{"Univ {}", "{} Univ", "University of {}"};
  const std::string org = fmt::format(fmt::runtime(kForms[pick(kForms.size())]), s.word);
  return make_address(org, s.city, kCountries[s.country].code, kDepartments[dept % kDepartments.size()]);
}

Address Gen::hospital_address(std::size_t inst) {
  const InstSpec& s = inst_[inst];
  return make_address(s.hospital_word + " Hosp", s.city, kCountries[s.country].code, "Dept Med");
}

Address Gen::unmatchable_address() {
  ++unmatchable_;
  const std::size_t c = pick(kCountries.size());
  return make_address(word(unmatched_serial_++, 'X') + " Labs", "Nowhere", kCountries[c].code, "");
}

Publication Gen::base_publication(std::size_t serial, int year) {
  Publication pub;
  pub.id = fmt::format("WOS:{:09}", serial);
  pub.year = year;
  const double d = uniform();
  pub.doc_type = d < p_.letter_share                    ? DocType::letter
                 : d < p_.letter_share + p_.review_share ? DocType::review
                                                         : DocType::article;
  pub.language = chance(p_.non_english_share) ? kLanguages[pick(kLanguages.size())] : "en";
  pub.is_arts_humanities = chance(p_.arts_humanities_share);
  const std::size_t f0 = pick(p_.fields.size());
  if (p_.fields.size() > 1 && chance(p_.multi_field_rate)) {
    std::size_t f1 = pick(p_.fields.size() - 1);
    if (f1 >= f0) ++f1;
    pub.fields = {{p_.fields[f0], 0.5}, {p_.fields[f1], 0.5}};
  } else {
    pub.fields = {{p_.fields[f0], 1.0}};
  }
  return pub;
}

void Gen::add_home(Publication& pub, std::size_t inst, std::vector<TruthLink>& truth,
                   std::vector<std::optional<GeoPoint>>& coords) {
  const InstSpec& s = inst_[inst];
  if (chance(p_.unmatchable_address_rate)) {
    pub.addresses.push_back(unmatchable_address());
    coords.push_back(std::nullopt);
  } else if (chance(p_.hospital_rate)) {
    pub.addresses.push_back(hospital_address(inst));
    coords.push_back(s.has_geo ? std::optional<GeoPoint>(s.where) : std::nullopt);
  } else {
    pub.addresses.push_back(university_address(inst, pick(kDepartments.size())));
    coords.push_back(s.has_geo ? std::optional<GeoPoint>(s.where) : std::nullopt);
    truth.push_back({static_cast<InstIndex>(inst), 1});
  }
}

void Gen::add_collaborator(Publication& pub, std::size_t inst, std::vector<TruthLink>& truth,
                           std::vector<std::optional<GeoPoint>>& coords) {
  const InstSpec& s = inst_[inst];
  if (chance(p_.unmatchable_address_rate)) {
    pub.addresses.push_back(unmatchable_address());
    coords.push_back(std::nullopt);
    return;
  }
  pub.addresses.push_back(university_address(inst, pick(kDepartments.size())));
  coords.push_back(s.has_geo ? std::optional<GeoPoint>(s.where) : std::nullopt);
  for (auto& t : truth)
    if (t.institution == inst) {
      ++t.matched_addresses;
      return;
    }
  truth.push_back({static_cast<InstIndex>(inst), 1});
}

std::uint32_t Gen::draw_citations(const Publication& pub, bool collaborative) {
  static constexpr std::array<double, 8> kFieldFactor{1.6, 1.0, 0.4, 1.2, 0.8, 1.4, 0.6, 1.1};
  double factor = 0.0;
  for (const auto& f : pub.fields) {
    const auto it = std::find(p_.fields.begin(), p_.fields.end(), f.label);
    factor += f.fraction * kFieldFactor[static_cast<std::size_t>(it - p_.fields.begin()) % kFieldFactor.size()];
  }
  double mean = p_.citation_mean * factor;
  if (pub.doc_type == DocType::letter) mean *= 0.3;
  if (pub.doc_type == DocType::review) mean *= 2.0;
  mean *= static_cast<double>(p_.citation_window_end - pub.year + 1) /
          static_cast<double>(std::max(1, p_.citation_window_end - p_.year_min + 1)) * 1.5;
  if (collaborative) mean *= p_.collab_citation_multiplier;
  if (mean <= 0.0) return 0;
  const double lambda = std::gamma_distribution<double>(p_.dispersion, mean / p_.dispersion)(rng_);
  if (lambda <= 0.0) return 0;
  return static_cast<std::uint32_t>(std::poisson_distribution<long long>(lambda)(rng_));
}

// Distinct citing records for `cited` from the first `population` records.
void Gen::cite(PubIndex cited, std::uint32_t count, std::size_t population, std::mt19937_64& rng) {
  if (population < 2) return;
  count = static_cast<std::uint32_t>(std::min<std::size_t>(count, population - 1));
  std::vector<PubIndex> chosen;
  chosen.reserve(count);
  auto seen = [&](PubIndex c) { return std::find(chosen.begin(), chosen.end(), c) != chosen.end(); };
  std::unordered_set<PubIndex> big;
  const bool use_set = count > 64;
  std::uniform_int_distribution<std::size_t> any(0, population - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& own = pub_authors_[cited];
  std::size_t attempts = 0;
  while (chosen.size() < count && attempts < 50ULL * count + 100) {
    ++attempts;
    PubIndex c;
    if (!own.empty() && p_.self_citation_bias > 0.0 && u(rng) < p_.self_citation_bias) {
      const auto& list = author_pubs_[own[any(rng) % own.size()]];
      c = list[any(rng) % list.size()];
      if (c >= population) continue;
    } else {
      c = static_cast<PubIndex>(any(rng));
    }
    if (c == cited) continue;
    if (use_set ? big.contains(c) : seen(c)) continue;
    if (use_set) big.insert(c);
    chosen.push_back(c);
  }
  for (const PubIndex c : chosen) edges_.emplace_back(c, cited);
}

Bundle Gen::run() {
  p_.validate();
  make_institutions();
  Bundle b;
  std::vector<Publication> pubs;
  const auto n_main = static_cast<std::size_t>(p_.n_publications);
  const std::size_t n_pool =
      p_.citing_pool >= 0 ? static_cast<std::size_t>(p_.citing_pool) : n_main / 4;
  pubs.reserve(n_main + n_pool + static_cast<std::size_t>(p_.outlier_count));
  b.truth_links.reserve(pubs.capacity());
  b.truth_coords.reserve(pubs.capacity());
  author_pubs_.assign(inst_.size() * static_cast<std::size_t>(p_.authors_per_institution), {});
  const int years = p_.year_max - p_.year_min + 1;
  const auto per_inst = static_cast<std::size_t>(p_.authors_per_institution);

  auto add_authors = [&](Publication& pub, const std::vector<std::size_t>& insts) {
    std::vector<std::size_t> mine;
    for (std::size_t k = 0; k < insts.size(); ++k) {
      const std::size_t n_auth = k == 0 ? 1 + pick(3) : 1;
      for (std::size_t a = 0; a < n_auth; ++a) {
        const std::size_t g = insts[k] * per_inst + pick(per_inst);
        if (std::find(mine.begin(), mine.end(), g) != mine.end()) continue;
        mine.push_back(g);
        pub.authors.push_back(inst_[insts[k]].authors[g % per_inst]);
      }
    }
    for (const std::size_t g : mine) author_pubs_[g].push_back(static_cast<PubIndex>(pubs.size()));
    pub_authors_.push_back(std::move(mine));
  };

  std::vector<std::uint32_t> targets;
  targets.reserve(n_main);
  for (std::size_t i = 0; i < n_main; ++i) {
    const std::size_t home = i % inst_.size();
    Publication pub = base_publication(i, p_.year_min + static_cast<int>(pick(static_cast<std::size_t>(years))));
    std::vector<TruthLink> truth;
    std::vector<std::optional<GeoPoint>> coords;
    std::vector<std::size_t> insts{home};
    add_home(pub, home, truth, coords);
    if (chance(p_.collaboration_rate)) {
      if (!truth.empty() && chance(0.2)) {
        Address second = pub.addresses.front();
        second.department = kDepartments[pick(kDepartments.size())];
        second.department_tokens = normalize_org_name(second.department);
        pub.addresses.push_back(std::move(second));
        coords.push_back(coords.front());
        ++truth.front().matched_addresses;
      }
      const std::size_t extra = chance(0.3) ? 2 : 1;
      for (std::size_t e = 0; e < extra && inst_.size() > 1; ++e) {
        std::size_t other;
        const auto& same = by_country_[inst_[home].country];
        if (!chance(p_.international_rate) && same.size() > 1) {
          do other = same[pick(same.size())];
          while (other == home);
        } else {
          std::size_t tries = 0;
          do other = pick(inst_.size());
          while ((other == home || (inst_[other].country == inst_[home].country && tries < 20)) && ++tries < 40);
          if (other == home) other = (home + 1) % inst_.size();
        }
        insts.push_back(other);
        add_collaborator(pub, other, truth, coords);
      }
    }
    add_authors(pub, insts);
    std::set<std::vector<std::string>> orgs;
    for (const auto& a : pub.addresses) orgs.insert(a.org_tokens);
    targets.push_back(draw_citations(pub, orgs.size() > 1));
    pubs.push_back(std::move(pub));
    b.truth_links.push_back(std::move(truth));
    b.truth_coords.push_back(std::move(coords));
  }
  b.main_publications = n_main;

  for (std::size_t i = 0; i < n_pool; ++i) {
    const std::size_t inst = pick(inst_.size());
    Publication pub = base_publication(n_main + i, p_.citation_window_end + static_cast<int>(i % 2));
    pub.doc_type = DocType::article;
    pub.language = "en";
    std::vector<TruthLink> truth;
    std::vector<std::optional<GeoPoint>> coords;
    pub.addresses.push_back(university_address(inst, pick(kDepartments.size())));
    coords.push_back(inst_[inst].has_geo ? std::optional<GeoPoint>(inst_[inst].where) : std::nullopt);
    truth.push_back({static_cast<InstIndex>(inst), 1});
    add_authors(pub, {inst});
    pubs.push_back(std::move(pub));
    b.truth_links.push_back(std::move(truth));
    b.truth_coords.push_back(std::move(coords));
  }

  const std::size_t population = pubs.size();
  for (std::size_t i = 0; i < n_main; ++i)
    cite(static_cast<PubIndex>(i), targets[i], population, rng_);

  // Outliers draw from their own stream so the rest of the bundle is
  // identical with and without them.
  std::mt19937_64 orng(p_.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto oinst = static_cast<std::size_t>(p_.outlier_institution);
  for (int k = 0; k < p_.outlier_count; ++k) {
    Publication pub;
    pub.id = fmt::format("WOS:OUT{:06}", k);
    pub.year = std::clamp(2008, p_.year_min, p_.year_max);
    pub.doc_type = DocType::article;
    pub.language = "en";
    pub.fields = {{p_.fields.front(), 1.0}};
    pub.authors.push_back(inst_[oinst].authors.front());
    pub.addresses.push_back(
        make_address("Univ " + inst_[oinst].word, inst_[oinst].city, kCountries[inst_[oinst].country].code,
                     kDepartments[0]));
    const auto idx = static_cast<PubIndex>(pubs.size());
    b.outliers.push_back(idx);
    b.truth_links.push_back({{static_cast<InstIndex>(oinst), 1}});
    b.truth_coords.push_back({inst_[oinst].has_geo ? std::optional<GeoPoint>(inst_[oinst].where) : std::nullopt});
    pub_authors_.push_back({});
    pubs.push_back(std::move(pub));
    cite(idx, p_.outlier_citations, population, orng);
  }

  for (const auto& pub : pubs) b.total_addresses += pub.addresses.size();
  b.unmatchable_addresses = unmatchable_;

  for (std::size_t i = 0; i < inst_.size(); ++i) {
    const InstSpec& s = inst_[i];
    const std::string id = fmt::format("U{:04}", i);
    b.institutions.push_back({id, "University of " + s.word, kCountries[s.country].code});
    const int big = 20 + static_cast<int>(pick(200));
    b.thesaurus_entries.push_back({normalize_org_name("Univ " + s.word), id, big, OrgKind::university});
    b.thesaurus_entries.push_back({normalize_org_name(s.word + " Univ"), id, 5 + static_cast<int>(pick(50)),
                                   OrgKind::university});
    b.thesaurus_entries.push_back({normalize_org_name("University of " + s.word), id,
                                   5 + static_cast<int>(pick(50)), OrgKind::university});
    // Rare spelling below the occurrence cut-off; never used in addresses.
    b.thesaurus_entries.push_back({normalize_org_name("Univ " + s.word + " Hlth Sci"), id, 3, OrgKind::university});
    b.thesaurus_entries.push_back({normalize_org_name(s.hospital_word + " Hosp"), fmt::format("H{:04}", i),
                                   10, OrgKind::hospital});
    if (s.has_geo) {
      for (const std::string& form :
           {"Univ " + s.word, s.word + " Univ", "University of " + s.word, s.hospital_word + " Hosp"})
        b.geo_entries.emplace_back(address_key(normalize_org_name(form), s.city), s.where);
    }
  }
  b.thesaurus = Thesaurus(b.thesaurus_entries, b.institutions);
  for (const auto& [k, g] : b.geo_entries) b.geo.add(k, g);

  std::sort(edges_.begin(), edges_.end(), [](const auto& a, const auto& x) {
    return a.second != x.second ? a.second < x.second : a.first < x.first;
  });
  b.edges = std::move(edges_);
  b.corpus = Corpus(std::move(pubs));
  b.graph = CitationGraph(b.corpus.size(), b.edges);
  return b;
}

std::string fmt_coord(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

Bundle generate(const Params& params) { return Gen(params).run(); }

BundleTexts to_texts(const Bundle& b) {
  BundleTexts t;
  {
    std::string out;
    for (const auto& p : b.corpus) {
      out += serialize_publication(p);
      out += '\n';
    }
    t.publications = std::move(out);
  }
  {
    std::string out = "citing_id\tcited_id\n";
    for (const auto& [citing, cited] : b.edges) {
      out += b.corpus[citing].id;
      out += '\t';
      out += b.corpus[cited].id;
      out += '\n';
    }
    t.citations = std::move(out);
  }
  {
    std::string out = "variant\tinstitution_id\toccurrence_count\tkind\n";
    for (const auto& e : b.thesaurus_entries)
      out += fmt::format("{}\t{}\t{}\t{}\n", join(e.variant_tokens), e.institution_id, e.occurrence_count,
                         to_string(e.kind));
    t.thesaurus = std::move(out);
  }
  {
    std::string out = "id\tname\tcountry\n";
    for (const auto& i : b.institutions) out += fmt::format("{}\t{}\t{}\n", i.id, i.name, i.country);
    t.institutions = std::move(out);
  }
  {
    std::string out = "address_key\tlat\tlon\n";
    for (const auto& [k, g] : b.geo_entries) out += fmt::format("{}\t{}\t{}\n", k, fmt_coord(g.lat), fmt_coord(g.lon));
    t.geo = std::move(out);
  }
  return t;
}

void write_bundle(const Bundle& b, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("synthkit", fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  const BundleTexts t = to_texts(b);
  const std::pair<const char*, const std::string*> files[] = {{"publications.jsonl", &t.publications},
                                                               {"citations.tsv", &t.citations},
                                                               {"thesaurus.tsv", &t.thesaurus},
                                                               {"institutions.tsv", &t.institutions},
                                                               {"geo.tsv", &t.geo}};
  for (const auto& [name, body] : files) {
    std::ofstream out(dir / name, std::ios::binary);
    out << *body;
    if (!out) throw Error("synthkit", fmt::format("cannot write {}", (dir / name).string()));
  }
}

}  // namespace leiden::synth
