#include "hexflow/hexgrid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hexflow/csv.hpp"
#include "hexflow/error.hpp"

namespace hexflow {
namespace {

constexpr double kEarthRadiusM = 6371000.0;
constexpr double kDegToRad = M_PI / 180.0;
constexpr double kRadToDeg = 180.0 / M_PI;
constexpr double kSqrt3 = 1.7320508075688772;

double clamp1(double v) { return std::max(-1.0, std::min(1.0, v)); }

}  // namespace

std::string CellId::str() const {
  return std::to_string(q) + ":" + std::to_string(r);
}

std::optional<CellId> CellId::parse(std::string_view text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  const auto q = parse_int(text.substr(0, colon));
  const auto r = parse_int(text.substr(colon + 1));
  if (!q || !r) return std::nullopt;
  return CellId{static_cast<int>(*q), static_cast<int>(*r)};
}

void GridConfig::validate() const {
  if (!(edge_length_m > 0.0))
    throw ConfigError("grid: edge_length_m must be > 0");
  if (!(std::abs(anchor_lat) <= 90.0) || !(std::abs(anchor_lon) <= 180.0))
    throw ConfigError("grid: anchor coordinates out of range");
}

PlanarPoint project(double lat, double lon, const GridConfig& cfg) {
  const double phi0 = cfg.anchor_lat * kDegToRad;
  const double lam0 = cfg.anchor_lon * kDegToRad;
  const double phi = lat * kDegToRad;
  const double dlam = lon * kDegToRad - lam0;

  const double cos_c = clamp1(std::sin(phi0) * std::sin(phi) +
                              std::cos(phi0) * std::cos(phi) * std::cos(dlam));
  const double c = std::acos(cos_c);
  const double k = c < 1e-12 ? 1.0 : c / std::sin(c);
  return PlanarPoint{
      kEarthRadiusM * k * std::cos(phi) * std::sin(dlam),
      kEarthRadiusM * k *
          (std::cos(phi0) * std::sin(phi) -
           std::sin(phi0) * std::cos(phi) * std::cos(dlam))};
}

GeoPoint unproject(const PlanarPoint& p, const GridConfig& cfg) {
  const double phi0 = cfg.anchor_lat * kDegToRad;
  const double lam0 = cfg.anchor_lon * kDegToRad;
  const double rho = std::hypot(p.x, p.y);
  if (rho < 1e-9) return GeoPoint{cfg.anchor_lat, cfg.anchor_lon};
  const double c = rho / kEarthRadiusM;
  const double sin_c = std::sin(c);
  const double cos_c = std::cos(c);
  const double phi = std::asin(
      clamp1(cos_c * std::sin(phi0) + p.y * sin_c * std::cos(phi0) / rho));
  const double lam =
      lam0 + std::atan2(p.x * sin_c, rho * std::cos(phi0) * cos_c -
                                         p.y * std::sin(phi0) * sin_c);
  return GeoPoint{phi * kRadToDeg, lam * kRadToDeg};
}

PlanarPoint cell_center_planar(CellId c, const GridConfig& cfg) {
  const double s = cfg.edge_length_m;
  return PlanarPoint{s * 1.5 * c.q, s * kSqrt3 * (c.r + 0.5 * c.q)};
}

namespace {

// Cube rounding: round each cube coordinate, then repair the axis with the
// largest rounding error so x+y+z stays 0.
CellId cube_round(double qf, double rf) {
  const double xf = qf;
  const double zf = rf;
  const double yf = -xf - zf;
  double rx = std::round(xf);
  double ry = std::round(yf);
  double rz = std::round(zf);
  const double dx = std::abs(rx - xf);
  const double dy = std::abs(ry - yf);
  const double dz = std::abs(rz - zf);
  if (dx > dy && dx > dz) {
    rx = -ry - rz;
  } else if (dy > dz) {
    ry = -rx - rz;
  } else {
    rz = -rx - ry;
  }
  (void)ry;
  return CellId{static_cast<int>(rx), static_cast<int>(rz)};
}

}  // namespace

CellId geo_to_cell(double lat, double lon, const GridConfig& cfg) {
  if (!(std::abs(lat) <= 90.0) || !(std::abs(lon) <= 180.0))
    throw std::invalid_argument("geo_to_cell: coordinate out of range");
  const PlanarPoint p = project(lat, lon, cfg);
  const double s = cfg.edge_length_m;
  const double qf = (2.0 / 3.0) * p.x / s;
  const double rf = (-1.0 / 3.0 * p.x + kSqrt3 / 3.0 * p.y) / s;
  return cube_round(qf, rf);
}

GeoPoint cell_centroid(CellId c, const GridConfig& cfg) {
  return unproject(cell_center_planar(c, cfg), cfg);
}

std::vector<CellId> grid_disk(CellId c, int k) {
  std::vector<CellId> cells;
  cells.reserve(1 + 3 * k * (k + 1));
  for (int dq = -k; dq <= k; ++dq) {
    const int lo = std::max(-k, -dq - k);
    const int hi = std::min(k, -dq + k);
    for (int dr = lo; dr <= hi; ++dr) {
      cells.push_back(CellId{c.q + dq, c.r + dr});
    }
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

std::vector<CellId> neighbors(CellId c) {
  std::vector<CellId> cells = {
      CellId{c.q + 1, c.r},     CellId{c.q - 1, c.r},
      CellId{c.q, c.r + 1},     CellId{c.q, c.r - 1},
      CellId{c.q + 1, c.r - 1}, CellId{c.q - 1, c.r + 1}};
  std::sort(cells.begin(), cells.end());
  return cells;
}

int hex_distance(CellId a, CellId b) {
  const int dq = a.q - b.q;
  const int dr = a.r - b.r;
  return (std::abs(dq) + std::abs(dr) + std::abs(dq + dr)) / 2;
}

}  // namespace hexflow
