#include "hexflow/stops.hpp"

#include <cmath>
#include <stdexcept>

#include "hexflow/error.hpp"

namespace hexflow {
namespace {

constexpr double kEarthRadiusM = 6371000.0;
constexpr double kDegToRad = M_PI / 180.0;

// Incremental cluster: per-member sums of pairwise distances are maintained
// so each join costs O(n) instead of recomputing the medoid from scratch.
class Cluster {
 public:
  void reset(const Ping& p) {
    points_.assign(1, GeoPoint{p.lat, p.lon});
    dist_sums_.assign(1, 0.0);
    first_ts_ = last_ts_ = p.timestamp;
  }

  void add(const Ping& p) {
    const GeoPoint np{p.lat, p.lon};
    double new_sum = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      const double d =
          haversine_m(points_[i].lat, points_[i].lon, np.lat, np.lon);
      dist_sums_[i] += d;
      new_sum += d;
    }
    points_.push_back(np);
    dist_sums_.push_back(new_sum);
    last_ts_ = p.timestamp;
  }

  bool empty() const { return points_.empty(); }
  std::int64_t first_ts() const { return first_ts_; }
  std::int64_t last_ts() const { return last_ts_; }
  std::int64_t duration() const { return last_ts_ - first_ts_; }

  GeoPoint medoid() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < dist_sums_.size(); ++i) {
      if (dist_sums_[i] < dist_sums_[best]) best = i;
    }
    return points_[best];
  }

 private:
  std::vector<GeoPoint> points_;
  std::vector<double> dist_sums_;
  std::int64_t first_ts_ = 0;
  std::int64_t last_ts_ = 0;
};

}  // namespace

void StopParams::validate() const {
  if (!(radius_m > 0.0)) throw ConfigError("stops: radius_m must be > 0");
  if (max_gap_s <= 0) throw ConfigError("stops: max_gap_s must be > 0");
  if (min_duration_s <= 0)
    throw ConfigError("stops: min_duration_s must be > 0");
}

double haversine_m(double lat_a, double lon_a, double lat_b, double lon_b) {
  const double phi_a = lat_a * kDegToRad;
  const double phi_b = lat_b * kDegToRad;
  const double dphi = (lat_b - lat_a) * kDegToRad;
  const double dlam = (lon_b - lon_a) * kDegToRad;
  const double sp = std::sin(0.5 * dphi);
  const double sl = std::sin(0.5 * dlam);
  const double h = sp * sp + std::cos(phi_a) * std::cos(phi_b) * sl * sl;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

std::size_t medoid_index(std::span<const GeoPoint> points) {
  if (points.empty())
    throw std::invalid_argument("medoid: empty point list");
  std::size_t best = 0;
  double best_sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      sum += haversine_m(points[i].lat, points[i].lon, points[j].lat,
                         points[j].lon);
    }
    if (i == 0 || sum < best_sum) {
      best = i;
      best_sum = sum;
    }
  }
  return best;
}

GeoPoint medoid(std::span<const GeoPoint> points) {
  return points[medoid_index(points)];
}

std::vector<Stop> extract_stops(std::span<const Ping> trajectory,
                                const StopParams& params,
                                const GridConfig& grid) {
  params.validate();
  grid.validate();

  std::vector<Stop> stops;
  if (trajectory.empty()) return stops;

  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    if (trajectory[i].timestamp < trajectory[i - 1].timestamp)
      throw std::invalid_argument("extract_stops: trajectory not time-sorted");
  }

  const std::string& user = trajectory.front().user_id;
  Cluster cluster;
  cluster.reset(trajectory.front());

  auto flush = [&]() {
    if (cluster.duration() >= params.min_duration_s) {
      const GeoPoint m = cluster.medoid();
      stops.push_back(Stop{user, geo_to_cell(m.lat, m.lon, grid), m.lat, m.lon,
                           cluster.first_ts(), cluster.last_ts()});
    }
  };

  for (std::size_t i = 1; i < trajectory.size(); ++i) {
    const Ping& p = trajectory[i];
    const GeoPoint m = cluster.medoid();
    const bool near = haversine_m(p.lat, p.lon, m.lat, m.lon) <= params.radius_m;
    const bool recent = p.timestamp - cluster.last_ts() <= params.max_gap_s;
    if (near && recent) {
      cluster.add(p);
    } else {
      flush();
      cluster.reset(p);
    }
  }
  flush();
  return stops;
}

}  // namespace hexflow
