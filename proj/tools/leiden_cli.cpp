#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "leiden/error.hpp"
#include "leiden/ranking.hpp"
#include "leiden/synthkit.hpp"

namespace {

std::pair<int, int> parse_years(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw leiden::Error("config", "--years expects FROM:TO, got '" + s + "'");
  int a = 0;
  int b = 0;
  const auto ra = std::from_chars(s.data(), s.data() + colon, a);
  const auto rb = std::from_chars(s.data() + colon + 1, s.data() + s.size(), b);
  if (ra.ec != std::errc{} || ra.ptr != s.data() + colon || rb.ec != std::errc{} ||
      rb.ptr != s.data() + s.size())
    throw leiden::Error("config", "--years expects FROM:TO, got '" + s + "'");
  return {a, b};
}

struct RankArgs {
  std::string publications, citations, thesaurus, institutions, geo;
  std::string counting = "fractional";
  bool english_only = true;
  bool no_self_citations = true;
  std::string years = "2005:2009";
  int window_end = 2010;
  int top_n = 500;
  int min_per_year = 500;
  int min_occurrences = 5;
  double link_threshold = 0.5;
  double letter_weight = 0.25;
  int samples = 1000;
  double level = 95.0;
  std::uint64_t seed = 0;
  std::string out, summary_out, cells_out, validation_out, assignments_out;
};

int run_rank(const RankArgs& a) {
  leiden::RankingConfig cfg;
  const auto counting = leiden::parse_counting_scheme(a.counting);
  if (!counting) throw leiden::Error("config", "--counting must be full or fractional");
  cfg.counting = *counting;
  const auto [y0, y1] = parse_years(a.years);
  cfg.inclusion.year_min = y0;
  cfg.inclusion.year_max = y1;
  cfg.inclusion.citation_window_end = a.window_end;
  cfg.inclusion.english_only = a.english_only;
  cfg.inclusion.exclude_self_citations = a.no_self_citations;
  cfg.inclusion.letter_weight = a.letter_weight;
  cfg.top_n = a.top_n;
  cfg.min_pubs_per_year = a.min_per_year;
  cfg.min_occurrences = a.min_occurrences;
  cfg.link_threshold = a.link_threshold;
  cfg.bootstrap.samples = a.samples;
  cfg.bootstrap.level = a.level;
  cfg.bootstrap.seed = a.seed;
  cfg.inputs = {a.publications, a.citations, a.thesaurus, a.institutions, std::nullopt};
  if (!a.geo.empty()) cfg.inputs.geo = a.geo;
  cfg.outputs.report = a.out;
  auto opt = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return s;
  };
  cfg.outputs.summary = opt(a.summary_out);
  cfg.outputs.cells = opt(a.cells_out);
  cfg.outputs.validation = opt(a.validation_out);
  cfg.outputs.assignments = opt(a.assignments_out);

  const leiden::RankingReport report = leiden::generate_report(cfg);
  for (const auto& n : report.summary.notices) fmt::print(stderr, "notice: {}\n", n);
  fmt::print(stderr, "ranked {} of {} eligible institutions (fingerprint {})\n",
             report.summary.ranked_institutions, report.summary.eligible_institutions, report.fingerprint);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"University ranking indicators from publication, citation and affiliation data"};
  app.require_subcommand(1);

  RankArgs r;
  auto* rank = app.add_subcommand("rank", "Compute the ranking report");
  rank->add_option("--publications", r.publications, "JSON-lines publication records")->required();
  rank->add_option("--citations", r.citations, "citing/cited id pairs")->required();
  rank->add_option("--thesaurus", r.thesaurus, "organization name variants")->required();
  rank->add_option("--institutions", r.institutions, "rankable institutions")->required();
  rank->add_option("--geo", r.geo, "address coordinates");
  rank->add_option("--counting", r.counting, "full or fractional")->capture_default_str();
  rank->add_flag("--english-only", r.english_only, "English-language records only (=false to disable)")
      ->capture_default_str();
  rank->add_flag("--no-self-citations", r.no_self_citations, "exclude author self-citations (=false to keep)")
      ->capture_default_str();
  rank->add_option("--years", r.years, "publication window FROM:TO")->capture_default_str();
  rank->add_option("--citation-window-end", r.window_end, "last citing year counted")->capture_default_str();
  rank->add_option("--top-n", r.top_n, "institutions to rank")->capture_default_str();
  rank->add_option("--min-per-year", r.min_per_year, "minimum records in every window year")
      ->capture_default_str();
  rank->add_option("--min-occurrences", r.min_occurrences, "minimum variant occurrence count")
      ->capture_default_str();
  rank->add_option("--link-threshold", r.link_threshold, "author-link share for hospital records")
      ->capture_default_str();
  rank->add_option("--letter-weight", r.letter_weight, "weight of letters")->capture_default_str();
  rank->add_option("--bootstrap-samples", r.samples, "resamples per institution, 0 disables")
      ->capture_default_str();
  rank->add_option("--level", r.level, "stability interval level in percent")->capture_default_str();
  rank->add_option("--seed", r.seed, "bootstrap seed")->required();
  rank->add_option("--out", r.out, "report CSV")->required();
  rank->add_option("--summary-out", r.summary_out, "run summary TSV");
  rank->add_option("--cells-out", r.cells_out, "normalization cell TSV");
  rank->add_option("--validation-out", r.validation_out, "assignment validation TSV");
  rank->add_option("--assignments-out", r.assignments_out, "publication-institution links TSV");

  leiden::synth::Params sp;
  std::string synth_dir;
  auto* synth = app.add_subcommand("synth", "Write a synthetic input bundle");
  synth->add_option("--out-dir", synth_dir, "directory for the bundle files")->required();
  synth->add_option("--seed", sp.seed, "generator seed")->required();
  synth->add_option("--publications", sp.n_publications, "records inside the year window")
      ->capture_default_str();
  synth->add_option("--institutions", sp.n_institutions, "number of universities")->capture_default_str();
  synth->add_option("--collaboration-rate", sp.collaboration_rate)->capture_default_str();
  synth->add_option("--international-rate", sp.international_rate)->capture_default_str();
  synth->add_option("--citation-mean", sp.citation_mean)->capture_default_str();
  synth->add_option("--dispersion", sp.dispersion)->capture_default_str();
  synth->add_option("--collab-multiplier", sp.collab_citation_multiplier)->capture_default_str();
  synth->add_option("--letter-share", sp.letter_share)->capture_default_str();
  synth->add_option("--non-english-share", sp.non_english_share)->capture_default_str();
  synth->add_option("--outliers", sp.outlier_count, "publications with outlier-citations each")
      ->capture_default_str();
  synth->add_option("--outlier-citations", sp.outlier_citations)->capture_default_str();
  synth->add_option("--unmatchable-rate", sp.unmatchable_address_rate)->capture_default_str();
  synth->add_option("--hospital-rate", sp.hospital_rate)->capture_default_str();
  synth->add_option("--missing-geo-rate", sp.missing_geo_rate)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rank) return run_rank(r);
    if (*synth) {
      const auto bundle = leiden::synth::generate(sp);
      leiden::synth::write_bundle(bundle, synth_dir);
      fmt::print(stderr, "wrote {} records and {} citations to {}\n", bundle.corpus.size(), bundle.edges.size(),
                 synth_dir);
      return 0;
    }
  } catch (const leiden::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: internal: {}\n", e.what());
    return 1;
  }
  return 0;
}
