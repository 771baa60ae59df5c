#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hexflow {

// Axial coordinates of one flat-top hexagonal cell. A pure value: hashable,
// totally ordered lexicographically on (q, r).
struct CellId {
  int q = 0;
  int r = 0;

  friend auto operator<=>(const CellId&, const CellId&) = default;

  // Serialized form used in every CSV ("q:r").
  std::string str() const;
  static std::optional<CellId> parse(std::string_view text);
};

// Parameters of the local hex grid: a projection anchor and the hexagon edge
// length. The 3200 m default matches the average edge of a res-6 cell in
// hierarchical hexagonal indexes.
struct GridConfig {
  double anchor_lat = 0.0;
  double anchor_lon = 0.0;
  double edge_length_m = 3200.0;

  void validate() const;  // throws ConfigError
};

// Planar position in the local azimuthal-equidistant projection, meters.
struct PlanarPoint {
  double x = 0.0;  // east
  double y = 0.0;  // north
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

// Exact spherical azimuthal-equidistant projection centered at the anchor.
PlanarPoint project(double lat, double lon, const GridConfig& cfg);
GeoPoint unproject(const PlanarPoint& p, const GridConfig& cfg);

// Center of a cell in the projection plane.
PlanarPoint cell_center_planar(CellId c, const GridConfig& cfg);

// Geo coordinate -> containing cell (nearest-center via cube rounding).
// Throws std::invalid_argument for |lat|>90 or |lon|>180.
CellId geo_to_cell(double lat, double lon, const GridConfig& cfg);

// Geo centroid of a cell; inverse of geo_to_cell on centers.
GeoPoint cell_centroid(CellId c, const GridConfig& cfg);

// All cells within hex distance k of c, c included. Sorted, duplicate-free.
// |result| == 1 + 3k(k+1).
std::vector<CellId> grid_disk(CellId c, int k);

// The 6 axial neighbors of c (c excluded), sorted.
std::vector<CellId> neighbors(CellId c);

// Hex (cube) distance between two cells.
int hex_distance(CellId a, CellId b);

// Center-to-center spacing of adjacent cells, meters.
inline double cell_pitch_m(const GridConfig& cfg) {
  return cfg.edge_length_m * 1.7320508075688772;  // sqrt(3)
}

}  // namespace hexflow

template <>
struct std::hash<hexflow::CellId> {
  std::size_t operator()(const hexflow::CellId& c) const noexcept {
    const std::uint64_t key =
        (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.q)) << 32) |
        static_cast<std::uint32_t>(c.r);
    std::uint64_t z = key + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
  }
};
