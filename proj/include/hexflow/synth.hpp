#pragma once

#include <cstdint>
#include <vector>

#include "hexflow/hexgrid.hpp"
#include "hexflow/ingest.hpp"
#include "hexflow/urbanmask.hpp"

namespace hexflow {

// All synthetic timestamps count from this instant (2024-03-04T00:00:00Z).
inline constexpr std::int64_t kSimStart = 1709510400;

struct SynthConfig {
  int n_users = 200;
  int n_days = 28;
  int n_home_cells = 12;
  // Amplitude of the sinusoidal hour-of-day weighting applied to errand
  // departure times; 0 spreads errands uniformly over the day.
  double daily_period_strength = 1.0;
  // Fraction of user-hours that emit no pings at all (zero-inflation).
  double sparsity = 0.3;
  // Spread of the per-day errand count around its base of two trips.
  double noise_std = 0.5;
  std::uint64_t seed = 42;
  GridConfig grid;
  // With clusters on, workplaces form adjacent-cell zones sharing a common
  // day-to-day demand factor, so neighbouring cells carry correlated flow.
  // Off scatters every home and work cell at pairwise hex distance >= 3 and
  // gives each user an independent, memoryless day factor.
  bool work_clusters = true;

  // Throws ConfigError on nonpositive counts or out-of-range fractions.
  void validate() const;
};

// Commute-driven ping streams, grouped by user id and time-sorted within
// each user. Byte-identical for identical configs.
std::vector<Ping> generate_pings(const SynthConfig& cfg);

// Radiance blobs over the populated cells: urban cores peak near 12 nW on a
// ~1 nW background, with small seeded per-cell noise.
RadianceRaster generate_raster(const SynthConfig& cfg);

}  // namespace hexflow
