#include "leiden/ranking.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

#include "leiden/error.hpp"
#include "leiden/parallel.hpp"
#include "leiden/text.hpp"

namespace leiden {

void RankingConfig::validate() const {
  inclusion.validate();
  if (top_n < 1) throw Error("config", "top_n must be at least 1");
  if (min_pubs_per_year < 0) throw Error("config", "min_pubs_per_year must be non-negative");
  if (min_occurrences < 1) throw Error("config", "min_occurrences must be at least 1");
  if (!(link_threshold > 0.0 && link_threshold <= 1.0))
    throw Error("config", "link threshold must lie in (0, 1]");
  if (bootstrap.samples < 0) throw Error("config", "bootstrap samples must be non-negative");
  if (bootstrap.samples > 0) bootstrap.validate();
}

std::string RankingConfig::fingerprint() const {
  const auto& inc = inclusion;
  const std::string canonical = fmt::format(
      "years={}:{};window={};english_only={};exclude_self={};letter={:.17g};counting={};top_n={};"
      "min_per_year={};min_occ={};link={:.17g};samples={};level={:.17g};seed={}",
      inc.year_min, inc.year_max, inc.citation_window_end, inc.english_only ? 1 : 0,
      inc.exclude_self_citations ? 1 : 0, inc.letter_weight, to_string(counting), top_n,
      min_pubs_per_year, min_occurrences, link_threshold, bootstrap.samples, bootstrap.level,
      bootstrap.seed);
  return fmt::format("{:016x}", fnv1a64(canonical));
}

AssignmentConfig RankingConfig::assignment_config() const {
  return {min_occurrences, link_threshold, inclusion.year_min, inclusion.year_max};
}

namespace {

bool counts_for_output(const Publication& p, const InclusionConfig& cfg) {
  return p.year >= cfg.year_min && p.year <= cfg.year_max && !p.is_arts_humanities;
}

template <class F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(stage, e.what());
  }
}

}  // namespace

Selection select_universities(const Corpus& corpus, const AssignmentTable& at, const Thesaurus& t,
                              const RankingConfig& cfg) {
  const auto& inc = cfg.inclusion;
  const std::size_t years = static_cast<std::size_t>(inc.year_max - inc.year_min + 1);
  struct Candidate {
    InstIndex inst;
    double output;
  };
  std::vector<Candidate> eligible;
  const auto& links = at.links();
  for (InstIndex i = 0; i < t.institutions().size(); ++i) {
    std::vector<std::size_t> per_year(years, 0);
    double output = 0.0;
    for (const std::size_t li : at.for_institution(i)) {
      const Publication& p = corpus[links[li].publication];
      if (!counts_for_output(p, inc)) continue;
      ++per_year[static_cast<std::size_t>(p.year - inc.year_min)];
      output += p.doc_type == DocType::letter ? inc.letter_weight : 1.0;
    }
    const bool ok = std::all_of(per_year.begin(), per_year.end(), [&](std::size_t n) {
      return n >= static_cast<std::size_t>(cfg.min_pubs_per_year);
    });
    if (ok) eligible.push_back({i, output});
  }
  std::sort(eligible.begin(), eligible.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.output != b.output) return a.output > b.output;
    return t.institution(a.inst).id < t.institution(b.inst).id;
  });
  Selection s;
  s.eligible = eligible.size();
  const auto keep = std::min(eligible.size(), static_cast<std::size_t>(cfg.top_n));
  for (std::size_t k = 0; k < keep; ++k) s.institutions.push_back(eligible[k].inst);
  if (eligible.size() < static_cast<std::size_t>(cfg.top_n))
    s.notice = fmt::format("only {} eligible institutions for top_n = {}", eligible.size(), cfg.top_n);
  return s;
}

PipelineResult run_pipeline(const Corpus& corpus, const CitationGraph& graph, const Thesaurus& t,
                            const GeoTable& geo, const RankingConfig& cfg) {
  run_stage("config", [&] { cfg.validate(); });
  PipelineResult out;
  out.assignment = run_stage("assignment", [&] { return assign_corpus(corpus, t, cfg.assignment_config()); });
  out.cells = run_stage("normalization", [&] { return build_cells(corpus, graph, cfg.inclusion); });
  const AssignmentTable& at = out.assignment.table;

  const IndicatorContext ctx =
      run_stage("indicators", [&] { return IndicatorContext(corpus, at, out.cells, geo, cfg.inclusion); });
  const Selection sel = run_stage("ranking", [&] { return select_universities(corpus, at, t, cfg); });

  RankingReport& report = out.report;
  report.fingerprint = cfg.fingerprint();
  report.counting = cfg.counting;
  report.rows.resize(sel.institutions.size());
  run_stage("indicators", [&] {
    parallel_for(sel.institutions.size(), [&](std::size_t k) {
      const InstIndex inst = sel.institutions[k];
      RankedRow& row = report.rows[k];
      row.rank = static_cast<int>(k + 1);
      row.institution = t.institution(inst);
      row.report = compute_report(inst, ctx, cfg.counting);
      row.report.institution_id = row.institution.id;
      row.report.config_fingerprint = report.fingerprint;
    });
  });

  if (cfg.bootstrap.samples > 0) {
    run_stage("stability", [&] {
      for (std::size_t k = 0; k < sel.institutions.size(); ++k) {
        const auto sample = ctx.sample(sel.institutions[k], cfg.counting);
        if (sample.empty()) continue;
        std::vector<double> weights;
        weights.reserve(sample.size());
        for (const auto& s : sample) weights.push_back(s.weight);
        std::vector<std::vector<double>> columns;
        for (std::size_t ind = 1; ind < kIndicatorCount; ++ind) {
          std::vector<double> col;
          col.reserve(sample.size());
          for (const auto& s : sample) col.push_back(ctx.facts(s.publication).value(kAllIndicators[ind]));
          columns.push_back(std::move(col));
        }
        BootstrapSettings bs = cfg.bootstrap;
        bs.seed = substream_seed(cfg.bootstrap.seed, fnv1a64(report.rows[k].institution.id));
        const auto intervals = bootstrap_weighted_means(weights, columns, bs);
        for (std::size_t ind = 1; ind < kIndicatorCount; ++ind) {
          report.rows[k].intervals[ind] = intervals[ind - 1];
          report.rows[k].intervals[ind]->seed = cfg.bootstrap.seed;
        }
      }
    });
  }

  RankingSummary& sum = report.summary;
  sum.corpus_records = corpus.size();
  sum.eligible_institutions = sel.eligible;
  sum.ranked_institutions = sel.institutions.size();
  sum.unmatched_address_rate = out.assignment.report.unmatched_rate();
  if (sel.notice) sum.notices.push_back(*sel.notice);
  for (const auto& row : report.rows) ++sum.institutions_per_country[row.institution.country];

  std::vector<char> ranked(t.institutions().size(), 0);
  for (const InstIndex i : sel.institutions) ranked[i] = 1;
  std::size_t window_records = 0;
  std::size_t non_english = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& f = ctx.facts(static_cast<PubIndex>(i));
    sum.included_weight += f.inclusion_weight;
    if (f.inclusion_weight > 0.0 && f.zero_mean_cell) ++sum.zero_mean_publications;
    bool linked = false;
    for (const auto& l : at.for_publication(static_cast<PubIndex>(i))) linked = linked || ranked[l.institution];
    if (!linked) continue;
    sum.selected_weight += f.inclusion_weight;
    if (counts_for_output(corpus[i], cfg.inclusion)) {
      ++window_records;
      if (corpus[i].language != "en") ++non_english;
    }
  }
  sum.selected_share = sum.included_weight > 0.0 ? sum.selected_weight / sum.included_weight : 0.0;
  sum.non_english_share =
      window_records > 0 ? static_cast<double>(non_english) / static_cast<double>(window_records) : 0.0;
  if (sum.zero_mean_publications > 0)
    sum.notices.push_back(fmt::format("{} publications fall in a zero-mean cell", sum.zero_mean_publications));
  return out;
}

RankingReport generate_report(const RankingConfig& cfg) {
  run_stage("config", [&] { cfg.validate(); });
  const auto& in = cfg.inputs;
  IngestResult ingest = run_stage("ingest", [&] { return parse_corpus_file(in.publications); });
  GraphLoadResult graph =
      run_stage("citations", [&] { return load_citations_file(in.citations, ingest.corpus); });
  const Thesaurus thesaurus =
      run_stage("thesaurus", [&] { return load_thesaurus_files(in.thesaurus, in.institutions); });
  const GeoTable geo = run_stage("geo", [&] { return in.geo ? load_geo_table_file(*in.geo) : GeoTable{}; });

  PipelineResult result = run_pipeline(ingest.corpus, graph.graph, thesaurus, geo, cfg);
  RankingSummary& sum = result.report.summary;
  sum.rejected_records = ingest.rejections.size();
  sum.rejected_citation_lines = graph.rejections.size();
  if (!ingest.rejections.empty())
    sum.notices.push_back(fmt::format("{} publication records rejected (first at line {}: {})",
                                      ingest.rejections.size(), ingest.rejections.entries.front().line,
                                      ingest.rejections.entries.front().reason));
  if (!graph.rejections.empty())
    sum.notices.push_back(fmt::format("{} citation lines rejected (first at line {}: {})",
                                      graph.rejections.size(), graph.rejections.entries.front().line,
                                      graph.rejections.entries.front().reason));

  const auto& outp = cfg.outputs;
  auto open = [](const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("export", "cannot write '" + p.string() + "'");
    return f;
  };
  export_csv(result.report, outp.report);
  if (outp.summary) {
    auto f = open(*outp.summary);
    write_summary(sum, f);
  }
  if (outp.cells) {
    auto f = open(*outp.cells);
    write_cell_table(result.cells, f);
  }
  if (outp.validation) {
    auto f = open(*outp.validation);
    write_validation_report(result.assignment.report, f);
  }
  if (outp.assignments) {
    auto f = open(*outp.assignments);
    write_assignment_table(result.assignment.table, ingest.corpus, thesaurus, f);
  }
  return std::move(result.report);
}

// ---------------------------------------------------------------------------
// Export

namespace {

std::string format_value(Indicator ind, std::optional<double> v) {
  if (!v) return "NA";
  if (ind == Indicator::MGCD) return fmt::format("{:.1f}", *v);
  return fmt::format("{:.4f}", *v);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::vector<std::string> export_columns() {
  std::vector<std::string> cols{"rank", "institution_id", "name", "country", "counting", "P"};
  for (std::size_t k = 1; k < kIndicatorCount; ++k) {
    const std::string name(to_string(kAllIndicators[k]));
    cols.push_back(name);
    cols.push_back(name + "_lower");
    cols.push_back(name + "_upper");
  }
  cols.push_back("config_fingerprint");
  return cols;
}

void export_csv(const RankingReport& report, std::ostream& out) {
  const auto cols = export_columns();
  out << join(cols, ",") << '\n';
  for (const auto& row : report.rows) {
    std::vector<std::string> cells;
    cells.push_back(std::to_string(row.rank));
    cells.push_back(csv_field(row.institution.id));
    cells.push_back(csv_field(row.institution.name));
    cells.push_back(csv_field(row.institution.country));
    cells.emplace_back(to_string(report.counting));
    cells.push_back(format_value(Indicator::P, row.report.get(Indicator::P)));
    for (std::size_t k = 1; k < kIndicatorCount; ++k) {
      const Indicator ind = kAllIndicators[k];
      cells.push_back(format_value(ind, row.report.get(ind)));
      const auto& iv = row.intervals[k];
      cells.push_back(format_value(ind, iv ? std::optional<double>(iv->lower) : std::nullopt));
      cells.push_back(format_value(ind, iv ? std::optional<double>(iv->upper) : std::nullopt));
    }
    cells.push_back(row.report.config_fingerprint);
    out << join(cells, ",") << '\n';
  }
}

void export_csv(const RankingReport& report, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("export", "cannot write '" + path.string() + "'");
  export_csv(report, f);
  f.flush();
  if (!f) throw Error("export", "failed writing '" + path.string() + "'");
}

void write_summary(const RankingSummary& s, std::ostream& out) {
  out << "metric\tvalue\n";
  out << "corpus_records\t" << s.corpus_records << '\n';
  out << "rejected_records\t" << s.rejected_records << '\n';
  out << "rejected_citation_lines\t" << s.rejected_citation_lines << '\n';
  out << "included_weight\t" << fmt::format("{:.4f}", s.included_weight) << '\n';
  out << "ranked_weight\t" << fmt::format("{:.4f}", s.selected_weight) << '\n';
  out << "ranked_share\t" << fmt::format("{:.4f}", s.selected_share) << '\n';
  out << "non_english_share\t" << fmt::format("{:.4f}", s.non_english_share) << '\n';
  out << "eligible_institutions\t" << s.eligible_institutions << '\n';
  out << "ranked_institutions\t" << s.ranked_institutions << '\n';
  out << "unmatched_address_rate\t" << fmt::format("{:.4f}", s.unmatched_address_rate) << '\n';
  out << "zero_mean_publications\t" << s.zero_mean_publications << '\n';
  for (const auto& [country, n] : s.institutions_per_country)
    out << "country:" << (country.empty() ? "NA" : country) << '\t' << n << '\n';
  for (const auto& n : s.notices) out << "notice\t" << n << '\n';
}

std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

}  // namespace leiden
