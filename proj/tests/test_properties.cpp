#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "leiden/text.hpp"
#include "support.hpp"

using namespace leiden;
using support::addr;
using support::entry;
using support::pub;

namespace {

std::string random_text(std::mt19937_64& g) {
  static const std::vector<std::string> pieces{
      "a", "Z", "é", "Ü", "ß", "Ł", "ø", "æ", "Ŝ", "ĳ", " ", "  ", "-", ".", ",", "'", "(", ")", "0", "9",
      "東", "\xCC\x81", "\xFF", "\xC3", "\t", "Univ", "Hosp", "\xE2\x80\x93", "\xC2\xA0", "’"};
  std::string s;
  const int n = std::uniform_int_distribution<int>(0, 24)(g);
  for (int i = 0; i < n; ++i) s += pieces[std::uniform_int_distribution<std::size_t>(0, pieces.size() - 1)(g)];
  return s;
}

synth::Bundle small_bundle(std::uint64_t seed, double collab = 0.4) {
  synth::Params p;
  p.seed = seed;
  p.n_institutions = 8;
  p.n_publications = 1200;
  p.collaboration_rate = collab;
  p.citation_mean = 10.0;
  p.letter_share = 0.15;
  return synth::generate(p);
}

}  // namespace

TEST_SUITE("properties") {
  TEST_CASE("normalization is idempotent") {
    std::mt19937_64 g(1);
    for (int i = 0; i < 1000; ++i) {
      const std::string s = random_text(g);
      const auto once = normalize_org_name(s);
      CHECK(normalize_org_name(join(once)) == once);
    }
  }

  TEST_CASE("corpus serialization round trip") {
    synth::Params p;
    p.n_publications = 100;
    p.citing_pool = 0;
    p.multi_field_rate = 0.5;
    p.non_english_share = 0.3;
    p.arts_humanities_share = 0.1;
    const auto b = synth::generate(p);
    std::vector<Publication> pubs(b.corpus.begin(), b.corpus.end());
    for (std::size_t i = 0; i < pubs.size(); i += 3) pubs[i].addresses[0].geo = GeoPoint{12.345678901234567, -7.5};
    pubs[1].fields = {{"Chemistry", 0.3}, {"Physics", 0.7}};
    const Corpus c(pubs);
    std::ostringstream out;
    write_corpus(c, out);
    const auto back = parse_corpus(out.str());
    CHECK(back.rejections.empty());
    CHECK(back.corpus == c);
  }

  TEST_CASE("haversine agrees with an independent formula") {
    std::mt19937_64 g(2);
    std::uniform_real_distribution<double> lat(-90, 90), lon(-180, 180);
    for (int i = 0; i < 1000; ++i) {
      const GeoPoint a{lat(g), lon(g)}, b{lat(g), lon(g)};
      const double d = geodesic_km(a, b);
      const double r = std::numbers::pi / 180.0;
      const double dl = (b.lon - a.lon) * r;
      const double y = std::hypot(std::cos(b.lat * r) * std::sin(dl),
                                  std::cos(a.lat * r) * std::sin(b.lat * r) -
                                      std::sin(a.lat * r) * std::cos(b.lat * r) * std::cos(dl));
      const double x = std::sin(a.lat * r) * std::sin(b.lat * r) + std::cos(a.lat * r) * std::cos(b.lat * r) * std::cos(dl);
      const double ref = 6371.0 * std::atan2(y, x);
      CHECK(std::fabs(d - ref) <= 1e-6 * std::max(1.0, ref));
      CHECK(d == geodesic_km(b, a));
      CHECK(d <= std::numbers::pi * 6371.0);
    }
  }

  TEST_CASE("adding a located address never shrinks the collaboration distance") {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> lat(-60, 60), lon(-180, 180);
    GeoTable geo;
    Publication p = pub("p");
    double last = 0.0;
    for (int i = 0; i < 30; ++i) {
      Address a = addr(fmt::format("Org {}", i));
      a.geo = GeoPoint{lat(g), lon(g)};
      p.addresses.push_back(a);
      const double d = collaboration_distance_km(p, geo);
      CHECK(d >= last);
      last = d;
    }
  }

  TEST_CASE("cell averages: score mean 1 and exactly x% top credit per cell") {
    const auto b = small_bundle(5);
    const InclusionConfig cfg;
    const auto cells = build_cells(b.corpus, b.graph, cfg);
    std::vector<double> w(cells.cells().size()), s(w.size());
    std::array<std::vector<double>, 3> top;
    for (auto& t : top) t.assign(w.size(), 0.0);
    for (PubIndex p = 0; p < b.corpus.size(); ++p) {
      if (!cells.contains(p)) continue;
      const double iw = inclusion_weight(b.corpus[p], cfg);
      for (const auto& ref : cells.cells_of(p)) {
        const auto& cell = cells.cells()[ref.cell];
        const double x = iw * ref.fraction;
        w[ref.cell] += x;
        s[ref.cell] += x * cells.citations(p) / cell.expected_citations;
      }
      // Per-cell top credit, restated from the thresholds.
      for (const auto& ref : cells.cells_of(p)) {
        const auto& cell = cells.cells()[ref.cell];
        for (std::size_t k = 0; k < 3; ++k) {
          const auto& th = cell.top[k];
          const double m = cells.citations(p) > th.citations ? 1.0 : cells.citations(p) == th.citations ? th.tie_fraction : 0.0;
          top[k][ref.cell] += iw * ref.fraction * m;
        }
      }
    }
    for (std::size_t c = 0; c < w.size(); ++c) {
      REQUIRE_FALSE(cells.cells()[c].zero_mean());
      CHECK(std::fabs(s[c] / w[c] - 1.0) <= 1e-9);
      for (std::size_t k = 0; k < 3; ++k)
        CHECK(std::fabs(top[k][c] / w[c] - kTopPercents[k] / 100.0) <= 1e-9);
    }
  }

  TEST_CASE("raising citations never lowers score or top membership") {
    const auto b = small_bundle(6);
    const InclusionConfig cfg;
    auto counts = countable_citation_counts(b.corpus, b.graph, cfg);
    const auto before = build_cells(b.corpus, counts, cfg);
    std::mt19937_64 g(6);
    for (int trial = 0; trial < 40; ++trial) {
      const auto p = static_cast<PubIndex>(std::uniform_int_distribution<std::size_t>(0, b.main_publications - 1)(g));
      if (!before.contains(p)) continue;
      auto raised = counts;
      raised[p] += 1 + static_cast<std::uint32_t>(trial % 7);
      const auto after = build_cells(b.corpus, raised, cfg);
      CHECK(normalized_score(p, after).score >= normalized_score(p, before).score);
      for (const int x : kTopPercents) CHECK(top_membership(p, x, after) >= top_membership(p, x, before) - 1e-12);
    }
  }

  TEST_CASE("self-citation exclusion never adds citations") {
    const auto b = small_bundle(7);
    InclusionConfig with, without;
    without.exclude_self_citations = false;
    const auto a = countable_citation_counts(b.corpus, b.graph, with);
    const auto c = countable_citation_counts(b.corpus, b.graph, without);
    std::size_t strictly = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i] <= c[i]);
      strictly += a[i] < c[i];
    }
    CHECK(strictly > 0);
  }

  TEST_CASE("ingest accounts for every non-blank line") {
    std::mt19937_64 g(8);
    const auto b = small_bundle(8);
    std::string text;
    std::size_t lines = 0;
    for (std::size_t i = 0; i < 300; ++i) {
      std::string line = serialize_publication(b.corpus[i]);
      const int r = std::uniform_int_distribution<int>(0, 5)(g);
      if (r == 0) line = line.substr(0, line.size() / 2);
      if (r == 1) line.replace(line.find("\"year\":"), 7, "\"yeer\":");
      text += line + "\n";
      ++lines;
      if (r == 2) text += "\n";
    }
    const auto res = parse_corpus(text);
    CHECK(res.lines == lines);
    CHECK(res.corpus.size() + res.rejections.size() == lines);
    CHECK(res.rejections.size() > 0);
  }

  TEST_CASE("fractional P sums to the included weight when every address is linked") {
    const auto b = small_bundle(9);
    const auto res = run_pipeline(b.corpus, b.graph, b.thesaurus, b.geo, support::open_config());
    double sum = 0.0;
    for (const auto& row : res.report.rows) sum += row.report.P();
    CHECK(sum == doctest::Approx(res.report.summary.included_weight).epsilon(1e-12));
  }

  TEST_CASE("full and fractional agree without collaboration") {
    const auto b = small_bundle(10, 0.0);
    const auto full = run_pipeline(b.corpus, b.graph, b.thesaurus, b.geo, support::open_config(CountingScheme::full));
    const auto frac = run_pipeline(b.corpus, b.graph, b.thesaurus, b.geo, support::open_config());
    REQUIRE(full.report.rows.size() == frac.report.rows.size());
    for (std::size_t i = 0; i < full.report.rows.size(); ++i)
      CHECK(full.report.rows[i].report.values == frac.report.rows[i].report.values);
  }

  TEST_CASE("indicators are invariant under record permutation") {
    const auto b = small_bundle(11);
    std::vector<PubIndex> order(b.corpus.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 g(11);
    std::shuffle(order.begin(), order.end(), g);
    std::vector<Publication> pubs;
    std::vector<PubIndex> where(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      pubs.push_back(b.corpus[order[k]]);
      where[order[k]] = static_cast<PubIndex>(k);
    }
    std::vector<std::pair<PubIndex, PubIndex>> edges;
    for (const auto& [a, c] : b.edges) edges.emplace_back(where[a], where[c]);
    std::shuffle(edges.begin(), edges.end(), g);
    const Corpus shuffled(std::move(pubs));
    const CitationGraph graph(shuffled.size(), edges);
    const auto x = run_pipeline(b.corpus, b.graph, b.thesaurus, b.geo, support::open_config());
    const auto y = run_pipeline(shuffled, graph, b.thesaurus, b.geo, support::open_config());
    REQUIRE(x.report.rows.size() == y.report.rows.size());
    for (std::size_t i = 0; i < x.report.rows.size(); ++i) {
      CHECK(x.report.rows[i].institution.id == y.report.rows[i].institution.id);
      for (std::size_t k = 0; k < kIndicatorCount; ++k) {
        const auto u = x.report.rows[i].report.values[k];
        const auto v = y.report.rows[i].report.values[k];
        REQUIRE(u.has_value() == v.has_value());
        if (u) CHECK(std::fabs(*u - *v) <= 1e-12 * std::max(1.0, std::fabs(*u)));
      }
    }
  }

  TEST_CASE("removing a thesaurus entry never adds round-one links (ambiguity-free thesaurus)") {
    const auto b = small_bundle(12);
    const auto base = assign_corpus(b.corpus, b.thesaurus, {});
    std::mt19937_64 g(12);
    for (int trial = 0; trial < 10; ++trial) {
      auto entries = b.thesaurus_entries;
      entries.erase(entries.begin() +
                    static_cast<std::ptrdiff_t>(std::uniform_int_distribution<std::size_t>(0, entries.size() - 1)(g)));
      const Thesaurus t(entries, b.institutions);
      CHECK(assign_corpus(b.corpus, t, {}).report.round_one_links <= base.report.round_one_links);
    }
  }

  TEST_CASE("removing an entry that causes an ambiguity can add a link") {
    // Documented counterexample: two equal-length variants make the address
    // ambiguous; removing one resolves it in favour of the other.
    Corpus c({pub("p", 2007, DocType::article, {addr("Ecole Normale / Coll France")})});
    const std::vector<Institution> inst{{"ENS", "ENS", "FR"}, {"CDF", "CDF", "FR"}};
    const Thesaurus both({entry("Ecole Normale", "ENS"), entry("Coll France", "CDF")}, inst);
    const Thesaurus one({entry("Ecole Normale", "ENS")}, inst);
    CHECK(assign_corpus(c, both, {}).report.round_one_links == 0);
    CHECK(assign_corpus(c, one, {}).report.round_one_links == 1);
  }

  TEST_CASE("bootstrap: nested levels, determinism and large-n narrowing") {
    std::mt19937_64 g(13);
    std::vector<double> x(400);
    for (auto& v : x) v = std::exponential_distribution<double>(1.0)(g);
    const std::vector<double> w(x.size(), 1.0);
    const std::vector<std::vector<double>> cols{x};
    const auto i95 = bootstrap_weighted_means(w, cols, {1000, 95.0, 3})[0];
    const auto i90 = bootstrap_weighted_means(w, cols, {1000, 90.0, 3})[0];
    CHECK(i95.lower <= i90.lower);
    CHECK(i90.upper <= i95.upper);
    const auto again = bootstrap_weighted_means(w, cols, {1000, 95.0, 3})[0];
    CHECK(again.lower == i95.lower);
    CHECK(again.upper == i95.upper);

    int narrower = 0;
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> small(100), large(1000);
      for (auto& v : small) v = std::exponential_distribution<double>(1.0)(g);
      for (auto& v : large) v = std::exponential_distribution<double>(1.0)(g);
      const auto ws = bootstrap_weighted_means(std::vector<double>(100, 1.0), std::vector<std::vector<double>>{small},
                                               {500, 95.0, static_cast<std::uint64_t>(trial)})[0];
      const auto wl = bootstrap_weighted_means(std::vector<double>(1000, 1.0), std::vector<std::vector<double>>{large},
                                               {500, 95.0, static_cast<std::uint64_t>(trial)})[0];
      narrower += wl.width() < ws.width();
    }
    CHECK(narrower == 10);
  }

  TEST_CASE("weighted/unweighted citation ratio") {
    // Address count independent of citations: ratio exactly 1.
    std::vector<Publication> pubs;
    for (int i = 0; i < 6; ++i) {
      std::vector<Address> a{addr("Univ Alpha")};
      if (i >= 3) a.push_back(addr("Univ Beta"));
      pubs.push_back(pub(fmt::format("p{}", i), 2007, DocType::article, a));
    }
    const Corpus c(pubs);
    const auto cells = build_cells(c, std::vector<std::uint32_t>{0, 5, 10, 0, 5, 10}, {});
    const auto flat = full_counting_bonus_ratios(c, cells, {});
    REQUIRE(flat.size() == 1);
    CHECK(*flat[0].ratio == doctest::Approx(1.0));

    synth::Params p;
    p.n_publications = 3000;
    p.collab_citation_multiplier = 2.0;
    p.collaboration_rate = 0.5;
    const auto b = synth::generate(p);
    const auto bc = build_cells(b.corpus, b.graph, {});
    for (const auto& r : full_counting_bonus_ratios(b.corpus, bc, {})) CHECK(*r.ratio > 1.0);
  }

  TEST_CASE("selection is deterministic and country counts sum to the total") {
    const auto b = small_bundle(14);
    auto cfg = support::open_config();
    cfg.min_pubs_per_year = 20;
    cfg.top_n = 5;
    const auto res = assign_corpus(b.corpus, b.thesaurus, cfg.assignment_config());
    const auto s1 = select_universities(b.corpus, res.table, b.thesaurus, cfg);
    const auto s2 = select_universities(b.corpus, res.table, b.thesaurus, cfg);
    CHECK(s1.institutions == s2.institutions);
    const auto run = run_pipeline(b.corpus, b.graph, b.thesaurus, b.geo, cfg);
    std::size_t total = 0;
    for (const auto& [k, n] : run.report.summary.institutions_per_country) total += n;
    CHECK(total == run.report.rows.size());
  }
}
