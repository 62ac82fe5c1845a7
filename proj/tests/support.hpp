#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "leiden/ranking.hpp"
#include "leiden/synthkit.hpp"

#include <fmt/format.h>

namespace support {

using namespace leiden;

inline Address addr(std::string org, std::string city = "", std::string country = "", std::string dept = "") {
  Address a;
  a.raw = std::move(org);
  a.org_tokens = normalize_org_name(a.raw);
  a.city = std::move(city);
  a.country = std::move(country);
  a.department = std::move(dept);
  a.department_tokens = normalize_org_name(a.department);
  return a;
}

inline Publication pub(std::string id, int year = 2007, DocType t = DocType::article,
                       std::vector<Address> addresses = {}, std::vector<AuthorName> authors = {},
                       std::vector<FieldShare> fields = {{"Physics", 1.0}}) {
  Publication p;
  p.id = std::move(id);
  p.year = year;
  p.doc_type = t;
  p.language = "en";
  p.fields = std::move(fields);
  p.authors = std::move(authors);
  p.addresses = std::move(addresses);
  return p;
}

inline ThesaurusEntry entry(std::string variant, std::string inst, int count = 10,
                            OrgKind kind = OrgKind::university) {
  return {normalize_org_name(variant), std::move(inst), count, kind};
}

/// Config that ranks every institution with at least one publication.
inline RankingConfig open_config(CountingScheme scheme = CountingScheme::fractional) {
  RankingConfig cfg;
  cfg.counting = scheme;
  cfg.min_pubs_per_year = 0;
  cfg.top_n = 1000000;
  cfg.bootstrap.samples = 0;
  return cfg;
}

struct EngineRun {
  IngestResult ingest;
  GraphLoadResult graph;
  Thesaurus thesaurus;
  GeoTable geo;
  PipelineResult result;

  std::map<std::string, const RankedRow*> by_id() const {
    std::map<std::string, const RankedRow*> m;
    for (const auto& r : result.report.rows) m[r.institution.id] = &r;
    return m;
  }
};

/// Runs the engine on a bundle after a trip through the on-disk text formats.
inline EngineRun run_from_texts(const synth::Bundle& b, const RankingConfig& cfg) {
  const synth::BundleTexts t = synth::to_texts(b);
  EngineRun r;
  r.ingest = parse_corpus(t.publications);
  r.graph = load_citations(t.citations, r.ingest.corpus);
  r.thesaurus = load_thesaurus(t.thesaurus, t.institutions);
  r.geo = load_geo_table(t.geo);
  r.result = run_pipeline(r.ingest.corpus, r.graph.graph, r.thesaurus, r.geo, cfg);
  return r;
}

/// P-weighted mean of an indicator over the report rows.
inline double weighted_mean(const RankingReport& rep, Indicator ind) {
  double w = 0.0;
  double s = 0.0;
  for (const auto& row : rep.rows) {
    const auto v = row.report.get(ind);
    if (!v) continue;
    w += row.report.P();
    s += row.report.P() * *v;
  }
  return s / w;
}

}  // namespace support
