#include <doctest.h>

#include <cmath>
#include <numbers>

#include "leiden/error.hpp"
#include "support.hpp"

using namespace leiden;
using support::addr;
using support::pub;

namespace {

// Spherical law of cosines through atan2, as an independent reference.
double reference_km(GeoPoint a, GeoPoint b) {
  const double r = std::numbers::pi / 180.0;
  const double p1 = a.lat * r, p2 = b.lat * r, dl = (b.lon - a.lon) * r;
  const double y = std::hypot(std::cos(p2) * std::sin(dl),
                              std::cos(p1) * std::sin(p2) - std::sin(p1) * std::cos(p2) * std::cos(dl));
  const double x = std::sin(p1) * std::sin(p2) + std::cos(p1) * std::cos(p2) * std::cos(dl);
  return 6371.0 * std::atan2(y, x);
}

Address located(std::string org, double lat, double lon) {
  Address a = addr(std::move(org));
  a.geo = GeoPoint{lat, lon};
  return a;
}

}  // namespace

TEST_SUITE("geo") {
  TEST_CASE("geodesic distance") {
    CHECK(geodesic_km({10.0, 20.0}, {10.0, 20.0}) == 0.0);
    CHECK(geodesic_km({0.0, 0.0}, {0.0, 180.0}) == doctest::Approx(std::numbers::pi * 6371.0));
    CHECK(std::fabs(geodesic_km({0.0, 0.0}, {0.0, 180.0}) - 20015.09) < 0.01);
    const GeoPoint paris{48.8566, 2.3522}, london{51.5074, -0.1278};
    const double d = geodesic_km(paris, london);
    CHECK(std::fabs(d - reference_km(paris, london)) <= 1e-6 * d);
    CHECK(d == geodesic_km(london, paris));
    CHECK(geodesic_km({90.0, 0.0}, {-90.0, 0.0}) <= std::numbers::pi * 6371.0);
  }

  TEST_CASE("collaboration distance") {
    GeoTable geo;
    CHECK(collaboration_distance_km(pub("a", 2007, DocType::article, {located("X", 0, 0)}), geo) == 0.0);
    // 1200 km due north along a meridian.
    const double dlat = 1200.0 / 6371.0 * 180.0 / std::numbers::pi;
    const auto three = pub("b", 2007, DocType::article,
                           {located("X", 0, 0), located("Y", 0, 0), located("Z", dlat, 0)});
    CHECK(collaboration_distance_km(three, geo) == doctest::Approx(1200.0));
    const auto unlocated = pub("c", 2007, DocType::article, {located("X", 0, 0), addr("Nowhere")});
    CHECK(collaboration_distance_km(unlocated, geo) == 0.0);
  }

  TEST_CASE("table lookups by address key") {
    GeoTable geo = load_geo_table("address_key\tlat\tlon\nUniv Alpha Oxford\t51.75\t-1.25\nbeta lab  cambridge\t52.2\t0.12\n");
    CHECK(geo.size() == 2);
    const Address a = addr("Univ. Alpha", "OXFORD");
    CHECK(address_key(a) == "univ alpha oxford");
    REQUIRE(geo.locate(a));
    CHECK(geo.locate(a)->lat == 51.75);
    Address inline_geo = addr("Univ Alpha", "Oxford");
    inline_geo.geo = GeoPoint{1.0, 2.0};
    CHECK(geo.locate(inline_geo)->lat == 1.0);
    CHECK_FALSE(geo.locate(addr("Gamma")));
  }

  TEST_CASE("bad geo rows are errors") {
    CHECK_THROWS_AS(load_geo_table("k\t95\t0\n"), Error);
    CHECK_THROWS_AS(load_geo_table("k\tabc\t0\n"), Error);
    CHECK_THROWS_AS(load_geo_table("k\t1\n"), Error);
    GeoTable g;
    CHECK_THROWS_AS(g.add("k", {0.0, 181.0}), Error);
    CHECK_THROWS_AS(load_geo_table_file("/nonexistent"), Error);
  }
}
