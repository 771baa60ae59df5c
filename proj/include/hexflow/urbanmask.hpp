#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <vector>

#include "hexflow/hexgrid.hpp"

namespace hexflow {

// Night-time radiance per cell, nW·cm^-2·sr^-1.
struct RadianceRaster {
  std::map<CellId, double> values;

  // Throws std::invalid_argument on negative or non-finite radiance.
  void validate() const;
};

struct UrbanMask {
  std::map<CellId, bool> binary;      // smoothed urban flag, all raster cells
  std::map<CellId, double> density;   // KDE density in [0, 1]
  std::vector<std::vector<CellId>> clusters;  // connected urban components

  // Cluster index per cell, -1 for non-urban.
  std::map<CellId, int> cluster_ids() const;
  std::set<CellId> urban_cells() const;
};

// Cell is urban iff radiance strictly exceeds tau.
std::map<CellId, bool> threshold_mask(const RadianceRaster& raster,
                                      double tau = 8.0);

// Normalized Gaussian smoothing of the binary mask over projected centroid
// distances: density(c) = sum_n urban(n) K(d(c,n)) / sum_n K(d(c,n)) with
// K(d) = exp(-d^2 / (2 bandwidth^2)). A cell stays urban iff its density
// reaches the cutoff; clusters are 6-neighbor connected components, listed
// in order of their smallest cell.
UrbanMask kde_smooth(const std::map<CellId, bool>& mask,
                     const GridConfig& cfg, double bandwidth_m,
                     double cutoff = 0.5);

// cell,radiance
void write_raster_csv(std::ostream& out, const RadianceRaster& raster);
RadianceRaster read_raster_csv(std::istream& in);

// cell,binary,density,cluster_id
void write_mask_csv(std::ostream& out, const UrbanMask& mask);
UrbanMask read_mask_csv(std::istream& in);

}  // namespace hexflow
