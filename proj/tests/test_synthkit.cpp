#include <doctest.h>

#include <cmath>

#include "leiden/error.hpp"
#include "support.hpp"

using namespace leiden;
using support::addr;
using support::pub;

TEST_SUITE("synthkit") {
  TEST_CASE("fixed seed gives a byte-identical bundle") {
    synth::Params p;
    p.n_publications = 600;
    p.seed = 17;
    const auto a = synth::to_texts(synth::generate(p));
    const auto b = synth::to_texts(synth::generate(p));
    CHECK(a.publications == b.publications);
    CHECK(a.citations == b.citations);
    CHECK(a.thesaurus == b.thesaurus);
    CHECK(a.geo == b.geo);
    p.seed = 18;
    CHECK(synth::to_texts(synth::generate(p)).publications != a.publications);
  }

  TEST_CASE("collaboration rate 0 gives single-address records") {
    synth::Params p;
    p.n_publications = 500;
    p.collaboration_rate = 0.0;
    const auto b = synth::generate(p);
    for (const auto& pb : b.corpus) CHECK(pb.addresses.size() == 1);
  }

  TEST_CASE("invalid parameters are generation errors") {
    synth::Params p;
    p.collaboration_rate = 1.5;
    CHECK_THROWS_AS(synth::generate(p), Error);
    p = {};
    p.n_publications = 3;
    p.n_institutions = 5;
    CHECK_THROWS_AS(synth::generate(p), Error);
    p = {};
    p.fields.clear();
    CHECK_THROWS_AS(synth::generate(p), Error);
    p = {};
    p.outlier_institution = 99;
    CHECK_THROWS_AS(synth::generate(p), Error);
  }

  TEST_CASE("bundle files re-parse cleanly") {
    synth::Params p;
    p.n_publications = 700;
    p.hospital_rate = 0.05;
    p.unmatchable_address_rate = 0.05;
    const auto b = synth::generate(p);
    const auto t = synth::to_texts(b);
    const auto ingest = parse_corpus(t.publications);
    CHECK(ingest.rejections.empty());
    CHECK(ingest.corpus == b.corpus);
    const auto g = load_citations(t.citations, ingest.corpus);
    CHECK(g.rejections.empty());
    CHECK(g.graph.edge_count() == b.edges.size());
    CHECK(load_thesaurus(t.thesaurus, t.institutions).entries().size() == b.thesaurus.entries().size());
    CHECK(load_geo_table(t.geo).size() == b.geo.size());
  }

  TEST_CASE("oracle P on 2 articles + 4 letters") {
    synth::Bundle b;
    std::vector<Publication> pubs;
    for (int i = 0; i < 6; ++i)
      pubs.push_back(pub(fmt::format("p{}", i), 2007, i < 2 ? DocType::article : DocType::letter, {addr("Univ A")}));
    b.corpus = Corpus(std::move(pubs));
    b.truth_links.assign(6, {{0, 1}});
    b.truth_coords.assign(6, {std::nullopt});
    const synth::Oracle o(b, {});
    CHECK(*o.indicator("P", 0) == 3.0);
    CHECK_THROWS_AS(o.indicator("h-index", 0), Error);
    CHECK_THROWS_AS(synth::oracle_indicator("nope", 0, b, {}), Error);
  }

  TEST_CASE("oracle corpus-wide fractional MNCS is 1") {
    synth::Params p;
    p.n_publications = 1800;
    p.citation_mean = 12.0;
    const auto b = synth::generate(p);
    const synth::Oracle o(b, {});
    double w = 0.0, s = 0.0;
    for (InstIndex i = 0; i < b.institutions.size(); ++i) {
      const double P = *o.indicator("P", i);
      w += P;
      s += P * o.indicator("MNCS", i).value_or(0.0);
    }
    CHECK(std::fabs(s / w - 1.0) <= 1e-9);
  }

  TEST_CASE("outlier moves oracle MNCS but not PP_top10") {
    synth::Params p;
    p.n_institutions = 20;
    p.n_publications = 4000;
    p.fields = {"Cardiology"};
    p.seed = 8;
    const auto base = synth::generate(p);
    p.outlier_count = 1;
    const auto hit = synth::generate(p);
    const synth::Oracle ob(base, {});
    const synth::Oracle oh(hit, {});
    CHECK(oh.citations(hit.outliers.at(0)) > 1000);
    const double dm = *oh.indicator("MNCS", 0) - *ob.indicator("MNCS", 0);
    const double dt = std::fabs(*oh.indicator("PP_top10", 0) - *ob.indicator("PP_top10", 0));
    CHECK(dm > 0.5);
    CHECK(dt < 0.01);
  }

  TEST_CASE("ground-truth links match the engine on exact-variant bundles") {
    synth::Params p;
    p.n_publications = 1200;
    p.seed = 44;
    const auto b = synth::generate(p);
    const auto res = assign_corpus(b.corpus, b.thesaurus, {});
    std::size_t truth_links = 0;
    for (PubIndex q = 0; q < b.corpus.size(); ++q) {
      truth_links += b.truth_links[q].size();
      for (const auto& t : b.truth_links[q]) {
        const auto* l = res.table.find(q, t.institution);
        REQUIRE(l != nullptr);
        CHECK(l->matched_address_count == t.matched_addresses);
      }
    }
    CHECK(truth_links == res.table.links().size());
  }
}
