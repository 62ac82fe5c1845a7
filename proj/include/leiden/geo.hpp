#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>

#include "leiden/corpus.hpp"

namespace leiden {

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance on a sphere of radius kEarthRadiusKm (haversine).
double geodesic_km(const GeoPoint& a, const GeoPoint& b);

/// Address coordinates keyed by address_key().
class GeoTable {
 public:
  /// Throws Error("geo") for out-of-range coordinates.
  void add(std::string key, GeoPoint point);
  std::optional<GeoPoint> lookup(std::string_view key) const;
  /// Coordinates carried by the address itself take precedence over the table.
  std::optional<GeoPoint> locate(const Address& a) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::unordered_map<std::string, GeoPoint> entries_;
};

/// Tab-separated address_key, lat, lon with an optional header row. Keys
/// are re-normalized on load so raw organization + city text also works.
GeoTable load_geo_table(std::string_view text);
GeoTable load_geo_table_file(const std::filesystem::path& path);

/// Largest pairwise distance between located addresses; 0 when fewer than two
/// addresses have coordinates.
double collaboration_distance_km(const Publication& p, const GeoTable& geo);

}  // namespace leiden
