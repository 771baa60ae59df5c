#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hexflow/hexgrid.hpp"
#include "hexflow/ingest.hpp"

namespace hexflow {

// A dwell event inferred from clustered pings.
struct Stop {
  std::string user_id;
  CellId cell;
  double medoid_lat = 0.0;
  double medoid_lon = 0.0;
  std::int64_t arrival = 0;
  std::int64_t departure = 0;
};

struct StopParams {
  double radius_m = 50.0;
  std::int64_t max_gap_s = 300;
  std::int64_t min_duration_s = 300;

  void validate() const;  // throws ConfigError
};

// Great-circle distance, Earth radius 6,371,000 m.
double haversine_m(double lat_a, double lon_a, double lat_b, double lon_b);

// Index of the member minimizing the sum of haversine distances to all
// members; ties broken by earliest index. Precondition: nonempty.
std::size_t medoid_index(std::span<const GeoPoint> points);
GeoPoint medoid(std::span<const GeoPoint> points);

// Sequential scan of one user's time-sorted trajectory. A point joins the
// current cluster iff it lies within radius_m of the running medoid and
// within max_gap_s of the previously accepted point; otherwise the cluster
// is flushed (emitted when its span reaches min_duration_s) and restarted.
// The trailing cluster is flushed at end of scan.
std::vector<Stop> extract_stops(std::span<const Ping> trajectory,
                                const StopParams& params,
                                const GridConfig& grid);

}  // namespace hexflow
