#include "hexflow/urbanmask.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "hexflow/csv.hpp"
#include "hexflow/error.hpp"

namespace hexflow {

void RadianceRaster::validate() const {
  for (const auto& [cell, v] : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("radiance for cell " + cell.str() +
                                  " must be finite and nonnegative");
  }
}

std::map<CellId, bool> threshold_mask(const RadianceRaster& raster,
                                      double tau) {
  if (tau < 0.0) throw std::invalid_argument("tau must be nonnegative");
  std::map<CellId, bool> mask;
  for (const auto& [cell, v] : raster.values) mask[cell] = v > tau;
  return mask;
}

UrbanMask kde_smooth(const std::map<CellId, bool>& mask, const GridConfig& cfg,
                     double bandwidth_m, double cutoff) {
  if (bandwidth_m <= 0.0)
    throw std::invalid_argument("bandwidth must be positive");
  if (!(cutoff > 0.0 && cutoff <= 1.0))
    throw std::invalid_argument("cutoff must lie in (0, 1]");

  std::vector<CellId> cells;
  std::vector<PlanarPoint> centers;
  std::vector<double> urban;
  cells.reserve(mask.size());
  for (const auto& [cell, is_urban] : mask) {
    cells.push_back(cell);
    centers.push_back(cell_center_planar(cell, cfg));
    urban.push_back(is_urban ? 1.0 : 0.0);
  }

  UrbanMask result;
  const double inv_two_h2 = 1.0 / (2.0 * bandwidth_m * bandwidth_m);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const double dx = centers[i].x - centers[j].x;
      const double dy = centers[i].y - centers[j].y;
      const double w = std::exp(-(dx * dx + dy * dy) * inv_two_h2);
      num += urban[j] * w;
      den += w;
    }
    const double density = den > 0.0 ? num / den : 0.0;
    result.density[cells[i]] = density;
    result.binary[cells[i]] = density >= cutoff;
  }

  // Connected components among urban cells, seeded in sorted cell order so
  // cluster ids are deterministic.
  std::set<CellId> unvisited;
  for (const auto& [cell, is_urban] : result.binary)
    if (is_urban) unvisited.insert(cell);
  while (!unvisited.empty()) {
    std::vector<CellId> component;
    std::deque<CellId> frontier{*unvisited.begin()};
    unvisited.erase(unvisited.begin());
    while (!frontier.empty()) {
      const CellId cell = frontier.front();
      frontier.pop_front();
      component.push_back(cell);
      for (const CellId& n : neighbors(cell)) {
        auto it = unvisited.find(n);
        if (it != unvisited.end()) {
          unvisited.erase(it);
          frontier.push_back(n);
        }
      }
    }
    std::sort(component.begin(), component.end());
    result.clusters.push_back(std::move(component));
  }
  return result;
}

std::map<CellId, int> UrbanMask::cluster_ids() const {
  std::map<CellId, int> ids;
  for (const auto& [cell, is_urban] : binary) ids[cell] = -1;
  for (std::size_t k = 0; k < clusters.size(); ++k)
    for (const CellId& cell : clusters[k]) ids[cell] = static_cast<int>(k);
  return ids;
}

std::set<CellId> UrbanMask::urban_cells() const {
  std::set<CellId> cells;
  for (const auto& [cell, is_urban] : binary)
    if (is_urban) cells.insert(cell);
  return cells;
}

void write_raster_csv(std::ostream& out, const RadianceRaster& raster) {
  out << "cell,radiance\n";
  for (const auto& [cell, v] : raster.values)
    out << cell.str() << ',' << format_double(v) << '\n';
}

RadianceRaster read_raster_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty raster file");
  chomp_cr(line);
  if (line != "cell,radiance")
    throw InputError("unexpected raster header: " + line);

  RadianceRaster raster;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw InputError("raster line " + std::to_string(line_no) +
                       ": expected 2 fields");
    const auto cell = CellId::parse(fields[0]);
    const auto v = parse_double(fields[1]);
    if (!cell || !v)
      throw InputError("raster line " + std::to_string(line_no) +
                       ": bad field");
    raster.values[*cell] = *v;
  }
  raster.validate();
  return raster;
}

void write_mask_csv(std::ostream& out, const UrbanMask& mask) {
  const auto ids = mask.cluster_ids();
  out << "cell,binary,density,cluster_id\n";
  for (const auto& [cell, is_urban] : mask.binary) {
    out << cell.str() << ',' << (is_urban ? 1 : 0) << ','
        << format_double(mask.density.at(cell)) << ',' << ids.at(cell)
        << '\n';
  }
}

UrbanMask read_mask_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty mask file");
  chomp_cr(line);
  if (line != "cell,binary,density,cluster_id")
    throw InputError("unexpected mask header: " + line);

  UrbanMask mask;
  std::map<int, std::vector<CellId>> clusters;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw InputError("mask line " + std::to_string(line_no) +
                       ": expected 4 fields");
    const auto cell = CellId::parse(fields[0]);
    const auto flag = parse_int(fields[1]);
    const auto density = parse_double(fields[2]);
    const auto cluster = parse_int(fields[3]);
    if (!cell || !flag || !density || !cluster)
      throw InputError("mask line " + std::to_string(line_no) + ": bad field");
    mask.binary[*cell] = *flag != 0;
    mask.density[*cell] = *density;
    if (*cluster >= 0) clusters[static_cast<int>(*cluster)].push_back(*cell);
  }
  for (auto& [id, cells] : clusters) {
    std::sort(cells.begin(), cells.end());
    mask.clusters.push_back(std::move(cells));
  }
  return mask;
}

}  // namespace hexflow
