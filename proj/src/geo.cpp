#include "leiden/geo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <vector>

#include <fmt/format.h>

#include "leiden/error.hpp"
#include "leiden/text.hpp"

namespace leiden {

double geodesic_km(const GeoPoint& a, const GeoPoint& b) {
  if (a == b) return 0.0;
  constexpr double rad = std::numbers::pi / 180.0;
  const double phi1 = a.lat * rad;
  const double phi2 = b.lat * rad;
  const double dphi = (b.lat - a.lat) * rad;
  const double dlambda = (b.lon - a.lon) * rad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  // Symmetric in (a, b): s1*s1 and s2*s2 are sign-independent and the cosine
  // product commutes.
  const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

void GeoTable::add(std::string key, GeoPoint point) {
  if (!valid_coordinates(point)) throw Error("geo", "coordinates out of range for '" + key + "'");
  entries_.insert_or_assign(std::move(key), point);
}

std::optional<GeoPoint> GeoTable::lookup(std::string_view key) const {
  const auto it = entries_.find(std::string(key));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<GeoPoint> GeoTable::locate(const Address& a) const {
  if (a.geo) return a.geo;
  if (entries_.empty()) return std::nullopt;
  return lookup(address_key(a));
}

namespace {

double parse_double(std::string_view s, std::size_t row) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw Error("geo", fmt::format("row {}: invalid number '{}'", row, s));
  return v;
}

}  // namespace

GeoTable load_geo_table(std::string_view text) {
  GeoTable table;
  std::size_t pos = 0;
  std::size_t row = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++row;
    if (line.empty() || line.front() == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 3) throw Error("geo", fmt::format("row {}: expected 3 columns", row));
    if (trim(cols[0]) == "address_key") continue;
    table.add(fold_text(cols[0]), {parse_double(cols[1], row), parse_double(cols[2], row)});
  }
  return table;
}

GeoTable load_geo_table_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("geo", "cannot open geo file '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_geo_table(text);
}

double collaboration_distance_km(const Publication& p, const GeoTable& geo) {
  if (p.addresses.size() < 2) return 0.0;
  GeoPoint local[16];
  std::vector<GeoPoint> heap;
  std::size_t n = 0;
  const bool small = p.addresses.size() <= std::size(local);
  for (const auto& a : p.addresses) {
    const auto g = geo.locate(a);
    if (!g) continue;
    if (small)
      local[n++] = *g;
    else
      heap.push_back(*g);
  }
  const GeoPoint* pts = small ? local : heap.data();
  if (!small) n = heap.size();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) best = std::max(best, geodesic_km(pts[i], pts[j]));
  return best;
}

}  // namespace leiden
