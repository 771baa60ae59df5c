#include "doctest.h"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "hexflow/rng.hpp"
#include "hexflow/urbanmask.hpp"
#include "oracles.hpp"

using namespace hexflow;

namespace {

const GridConfig kGrid{40.7128, -74.006, 3200.0};

}  // namespace

TEST_CASE("thresholding is strict at the boundary") {
  RadianceRaster raster;
  raster.values[CellId{0, 0}] = 7.9;
  raster.values[CellId{1, 0}] = 8.0;
  raster.values[CellId{2, 0}] = 8.1;
  const auto mask = threshold_mask(raster, 8.0);
  CHECK_FALSE(mask.at(CellId{0, 0}));
  CHECK_FALSE(mask.at(CellId{1, 0}));
  CHECK(mask.at(CellId{2, 0}));
}

TEST_CASE("empty raster gives an empty mask") {
  CHECK(threshold_mask(RadianceRaster{}, 8.0).empty());
  const UrbanMask mask = kde_smooth({}, kGrid, 1000.0, 0.5);
  CHECK(mask.binary.empty());
  CHECK(mask.clusters.empty());
}

TEST_CASE("raster validation rejects bad radiance") {
  RadianceRaster raster;
  raster.values[CellId{0, 0}] = -0.1;
  CHECK_THROWS_AS(raster.validate(), std::invalid_argument);
  raster.values[CellId{0, 0}] = std::nan("");
  CHECK_THROWS_AS(raster.validate(), std::invalid_argument);
  raster.values[CellId{0, 0}] = 3.0;
  CHECK_NOTHROW(raster.validate());
}

TEST_CASE("uniform masks are fixed points at any bandwidth") {
  for (const double bw : {500.0, cell_pitch_m(kGrid), 3 * cell_pitch_m(kGrid)}) {
    std::map<CellId, bool> all_urban, all_empty;
    for (const CellId c : grid_disk(CellId{0, 0}, 3)) {
      all_urban[c] = true;
      all_empty[c] = false;
    }
    const UrbanMask urban = kde_smooth(all_urban, kGrid, bw, 0.5);
    CHECK(urban.urban_cells().size() == all_urban.size());
    REQUIRE(urban.clusters.size() == 1);
    CHECK(urban.clusters[0].size() == all_urban.size());
    for (const auto& [cell, d] : urban.density) CHECK(d == 1.0);

    const UrbanMask empty = kde_smooth(all_empty, kGrid, bw, 0.5);
    CHECK(empty.urban_cells().empty());
    CHECK(empty.clusters.empty());
    for (const auto& [cell, d] : empty.density) CHECK(d == 0.0);
  }
}

TEST_CASE("an isolated speckle is suppressed at one-pitch bandwidth") {
  std::map<CellId, bool> mask;
  for (const CellId c : grid_disk(CellId{0, 0}, 2)) mask[c] = false;
  mask[CellId{0, 0}] = true;
  const UrbanMask smoothed =
      kde_smooth(mask, kGrid, cell_pitch_m(kGrid), 0.5);
  // 19-cell weighted average by hand: K(0)=1 against six cells at one pitch,
  // six at sqrt(3) pitch, six at two pitches.
  const double k1 = std::exp(-0.5), k3 = std::exp(-1.5), k4 = std::exp(-2.0);
  const double expected = 1.0 / (1.0 + 6 * (k1 + k3 + k4));
  CHECK(smoothed.density.at(CellId{0, 0}) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected < 0.5);
  CHECK_FALSE(smoothed.binary.at(CellId{0, 0}));
  CHECK(smoothed.urban_cells().empty());
}

TEST_CASE("density lies in [0,1] and grows monotonically with the mask") {
  Rng rng(61);
  const auto cells = grid_disk(CellId{0, 0}, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::map<CellId, bool> mask;
    std::vector<CellId> dark;
    for (const CellId c : cells) {
      mask[c] = rng.bernoulli(0.4);
      if (!mask[c]) dark.push_back(c);
    }
    const double bw = cell_pitch_m(kGrid) * rng.uniform(0.5, 3.0);
    const UrbanMask base = kde_smooth(mask, kGrid, bw, 0.5);
    for (const auto& [cell, d] : base.density) {
      CHECK(d >= 0.0);
      CHECK(d <= 1.0);
    }
    if (dark.empty()) continue;
    auto grown = mask;
    grown[dark[rng.uniform_int(dark.size())]] = true;
    const UrbanMask more = kde_smooth(grown, kGrid, bw, 0.5);
    for (const auto& [cell, d] : base.density)
      CHECK(more.density.at(cell) >= d - 1e-12);
  }
}

TEST_CASE("clusters match a flood-fill oracle on random rectangles") {
  Rng rng(62);
  for (int trial = 0; trial < 25; ++trial) {
    // Random urban pattern over a 10x10 axial block. A tiny bandwidth makes
    // the KDE step keep the pattern as-is, isolating cluster extraction.
    std::map<CellId, bool> mask;
    std::set<CellId> urban;
    for (int q = 0; q < 10; ++q)
      for (int r = 0; r < 10; ++r) {
        const bool on = rng.bernoulli(0.45);
        mask[CellId{q, r}] = on;
        if (on) urban.insert(CellId{q, r});
      }
    const UrbanMask smoothed = kde_smooth(mask, kGrid, 1.0, 0.5);
    REQUIRE(smoothed.urban_cells() == urban);

    const auto want = oracle::flood_fill_components(urban);
    REQUIRE(smoothed.clusters.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
      CHECK(smoothed.clusters[i] == want[i]);
  }
}

TEST_CASE("cluster ids label urban cells and leave the rest at -1") {
  std::map<CellId, bool> mask;
  for (const CellId c : grid_disk(CellId{0, 0}, 2)) mask[c] = false;
  // Two separated urban pairs inside a dark field, tiny bandwidth.
  mask[CellId{0, 0}] = true;
  mask[CellId{0, 1}] = true;
  mask[CellId{2, -2}] = true;
  const UrbanMask smoothed = kde_smooth(mask, kGrid, 1.0, 0.5);
  const auto ids = smoothed.cluster_ids();
  REQUIRE(smoothed.clusters.size() == 2);
  CHECK(ids.at(CellId{0, 0}) == 0);
  CHECK(ids.at(CellId{0, 1}) == 0);
  CHECK(ids.at(CellId{2, -2}) == 1);
  CHECK(ids.at(CellId{1, 0}) == -1);
}

TEST_CASE("raster and mask CSVs round-trip") {
  RadianceRaster raster;
  raster.values[CellId{0, 0}] = 11.25;
  raster.values[CellId{1, -1}] = 0.5;
  std::ostringstream rout;
  write_raster_csv(rout, raster);
  std::istringstream rin(rout.str());
  const RadianceRaster rback = read_raster_csv(rin);
  CHECK(rback.values == raster.values);

  std::map<CellId, bool> mask;
  for (const CellId c : grid_disk(CellId{0, 0}, 1)) mask[c] = true;
  const UrbanMask smoothed = kde_smooth(mask, kGrid, 1000.0, 0.5);
  std::ostringstream mout;
  write_mask_csv(mout, smoothed);
  std::istringstream min(mout.str());
  const UrbanMask mback = read_mask_csv(min);
  CHECK(mback.binary == smoothed.binary);
  CHECK(mback.density == smoothed.density);
  CHECK(mback.clusters == smoothed.clusters);
}
