#include <doctest.h>

#include "leiden/error.hpp"
#include "support.hpp"

using namespace leiden;
using support::addr;
using support::entry;
using support::pub;

namespace {

struct World {
  Corpus corpus;
  Thesaurus thesaurus;
  AssignmentResult assignment;
  CellTable cells;
  GeoTable geo;
  InclusionConfig cfg;
};

std::unique_ptr<World> make_world(std::vector<Publication> pubs, std::vector<std::uint32_t> citations,
                                  InclusionConfig cfg = {}) {
  auto w = std::make_unique<World>();
  w->corpus = Corpus(std::move(pubs));
  w->thesaurus = Thesaurus({entry("Univ Alpha", "A"), entry("Univ Beta", "B"), entry("Univ Gamma", "G")},
                           {{"A", "Alpha", "GB"}, {"B", "Beta", "FR"}, {"G", "Gamma", "GB"}});
  w->assignment = assign_corpus(w->corpus, w->thesaurus, {});
  w->cells = build_cells(w->corpus, std::move(citations), cfg);
  w->cfg = cfg;
  return w;
}

Address at(std::string org, std::string country, double lat, double lon) {
  Address a = addr(std::move(org), "", std::move(country));
  a.geo = GeoPoint{lat, lon};
  return a;
}

}  // namespace

TEST_SUITE("indicators") {
  TEST_CASE("institution weights") {
    auto w = make_world({pub("p", 2007, DocType::article,
                             {addr("Univ Alpha"), addr("Univ Alpha"), addr("Univ Beta"), addr("X"), addr("Y")})},
                        {0});
    const auto& t = w->assignment.table;
    CHECK(institution_weight(0, 0, w->corpus, t, CountingScheme::fractional) == 0.4);
    CHECK(institution_weight(0, 1, w->corpus, t, CountingScheme::fractional) == 0.2);
    CHECK(institution_weight(0, 0, w->corpus, t, CountingScheme::full) == 1.0);
    CHECK(institution_weight(0, 2, w->corpus, t, CountingScheme::full) == 0.0);
  }

  TEST_CASE("P with letters and fractional shares") {
    std::vector<Publication> pubs;
    for (int i = 0; i < 6; ++i)
      pubs.push_back(pub(fmt::format("p{}", i), 2007, i < 2 ? DocType::article : DocType::letter, {addr("Univ Alpha")}));
    pubs.push_back(pub("q", 2007, DocType::article,
                       {addr("Univ Alpha"), addr("Univ Alpha"), addr("Univ Beta"), addr("X"), addr("Y")}));
    auto w = make_world(std::move(pubs), std::vector<std::uint32_t>(7, 1));
    const IndicatorContext ctx(w->corpus, w->assignment.table, w->cells, w->geo, w->cfg);
    CHECK(compute_P(0, ctx, CountingScheme::full) == 4.0);
    CHECK(compute_P(0, ctx, CountingScheme::fractional) == doctest::Approx(3.4));
    CHECK(compute_P(2, ctx, CountingScheme::full) == 0.0);
    CHECK_FALSE(compute_MCS(2, ctx, CountingScheme::full));
    CHECK_THROWS_AS(compute_P(9, ctx, CountingScheme::full), Error);
  }

  TEST_CASE("MCS weights letters in numerator and denominator") {
    auto w = make_world({pub("a", 2007, DocType::article, {addr("Univ Alpha")}),
                         pub("b", 2007, DocType::letter, {addr("Univ Alpha")}),
                         pub("c", 2007, DocType::article, {addr("Univ Beta")})},
                        {8, 4, 14});
    const IndicatorContext ctx(w->corpus, w->assignment.table, w->cells, w->geo, w->cfg);
    CHECK(*compute_MCS(0, ctx, CountingScheme::full) == doctest::Approx(7.2));
    CHECK(*compute_MCS(1, ctx, CountingScheme::full) == 14.0);
  }

  TEST_CASE("MNCS and PP_top") {
    // Cell mean 1; Alpha holds a record at 2x and one at 0.
    auto w = make_world({pub("a", 2007, DocType::article, {addr("Univ Alpha")}),
                         pub("b", 2007, DocType::article, {addr("Univ Alpha")}),
                         pub("c", 2007, DocType::article, {addr("Univ Beta")}),
                         pub("d", 2007, DocType::article, {addr("Univ Beta")})},
                        {2, 0, 1, 1});
    const IndicatorContext ctx(w->corpus, w->assignment.table, w->cells, w->geo, w->cfg);
    CHECK(*compute_MNCS(0, ctx, CountingScheme::full) == 1.0);
    CHECK(*compute_MNCS(1, ctx, CountingScheme::full) == 1.0);
    // Top 10% of weight 4 = 0.4, all of it on the single 2-citation record.
    CHECK(*compute_PPtop(0, 10, ctx, CountingScheme::full) == doctest::Approx(0.2));
    CHECK(*compute_PPtop(1, 10, ctx, CountingScheme::full) == 0.0);
  }

  TEST_CASE("all tied in one cell gives PP_top10 = 0.10") {
    std::vector<Publication> pubs;
    for (int i = 0; i < 20; ++i) pubs.push_back(pub(fmt::format("p{}", i), 2007, DocType::article, {addr("Univ Alpha")}));
    auto w = make_world(std::move(pubs), std::vector<std::uint32_t>(20, 7));
    const IndicatorContext ctx(w->corpus, w->assignment.table, w->cells, w->geo, w->cfg);
    CHECK(*compute_PPtop(0, 10, ctx, CountingScheme::fractional) == doctest::Approx(0.1));
    CHECK(*compute_MNCS(0, ctx, CountingScheme::fractional) == doctest::Approx(1.0));
  }

  TEST_CASE("collaboration indicators") {
    auto w = make_world({pub("solo", 2007, DocType::article, {at("Univ Alpha", "GB", 51.75, -1.25)}),
                         pub("dom", 2007, DocType::article,
                             {at("Univ Alpha", "GB", 51.75, -1.25), at("Univ Gamma", "GB", 52.2, 0.12)}),
                         pub("intl", 2007, DocType::article,
                             {at("Univ Alpha", "GB", 51.75, -1.25), at("Univ Beta", "FR", 43.6, 1.44)})},
                        {0, 0, 0});
    const IndicatorContext ctx(w->corpus, w->assignment.table, w->cells, w->geo, w->cfg);
    const auto c = compute_collab_indicators(0, ctx, CountingScheme::full);
    CHECK(*c.pp_collab == doctest::Approx(2.0 / 3.0));
    CHECK(*c.pp_int_collab == doctest::Approx(1.0 / 3.0));
    const double d1 = geodesic_km({51.75, -1.25}, {52.2, 0.12});
    const double d2 = geodesic_km({51.75, -1.25}, {43.6, 1.44});
    CHECK(*c.mgcd_km == doctest::Approx((d1 + d2) / 3.0));
    CHECK(*c.pp_gt1000km == 0.0);
    const auto beta = compute_collab_indicators(1, ctx, CountingScheme::full);
    CHECK(*beta.pp_collab == 1.0);
    CHECK(*beta.pp_int_collab == 1.0);
  }

  TEST_CASE("single-address institution has no collaboration") {
    auto w = make_world({pub("a", 2007, DocType::article, {at("Univ Alpha", "GB", 1, 1)}),
                         pub("b", 2008, DocType::article, {at("Univ Alpha", "GB", 1, 1)})},
                        {3, 4});
    const IndicatorContext ctx(w->corpus, w->assignment.table, w->cells, w->geo, w->cfg);
    const auto r = compute_report(0, ctx, CountingScheme::fractional);
    for (const auto ind : {Indicator::PP_collab, Indicator::PP_int_collab, Indicator::MGCD, Indicator::PP_gt1000km})
      CHECK(*r.get(ind) == 0.0);
  }

  TEST_CASE("distance rule is strictly above 1000 km") {
    PublicationFacts f;
    f.distance_km = 1000.0;
    CHECK(f.value(Indicator::PP_gt1000km) == 0.0);
    f.distance_km = 1000.000001;
    CHECK(f.value(Indicator::PP_gt1000km) == 1.0);
  }

  TEST_CASE("indicator names round-trip") {
    for (const auto i : kAllIndicators) CHECK(parse_indicator(to_string(i)) == i);
    CHECK_FALSE(parse_indicator("h-index"));
    CHECK(parse_counting_scheme("full") == CountingScheme::full);
    CHECK_FALSE(parse_counting_scheme("harmonic"));
  }

  TEST_CASE("pearson correlation") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(*pearson_correlation(x, x) == doctest::Approx(1.0));
    CHECK(*pearson_correlation(x, neg) == doctest::Approx(-1.0));
    CHECK_FALSE(pearson_correlation(x, std::vector<double>(5, 2.0)));
    CHECK_THROWS_AS(pearson_correlation(x, std::vector<double>{1.0}), Error);
    CHECK_THROWS_AS(pearson_correlation(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
    // Direct formula.
    const std::vector<double> y{2.0, 1.0, 4.0, 3.0, 7.0};
    double mx = 3.0, my = 3.4, sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < 5; ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    CHECK(std::fabs(*pearson_correlation(x, y) - sxy / std::sqrt(sxx * syy)) < 1e-12);
  }
}
