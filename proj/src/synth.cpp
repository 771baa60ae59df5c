#include "hexflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "hexflow/error.hpp"
#include "hexflow/rng.hpp"

namespace hexflow {

void SynthConfig::validate() const {
  if (n_users <= 0 || n_days <= 0 || n_home_cells <= 0)
    throw ConfigError("synth counts must be positive");
  if (!(sparsity >= 0.0 && sparsity <= 1.0))
    throw ConfigError("sparsity must lie in [0, 1]");
  if (daily_period_strength < 0.0)
    throw ConfigError("daily_period_strength must be nonnegative");
  if (noise_std < 0.0) throw ConfigError("noise_std must be nonnegative");
  grid.validate();
}

namespace {

constexpr std::int64_t kDay = 86400;

// Distinct derivation salts so the draw order of one concern cannot shift
// another's stream.
constexpr std::uint64_t kLayoutSalt = 0x10;
constexpr std::uint64_t kFactorSalt = 0x20;
constexpr std::uint64_t kRasterSalt = 0x30;
constexpr std::uint64_t kUserSched = 0;
constexpr std::uint64_t kUserSilence = 1;
constexpr std::uint64_t kUserPings = 2;

Rng user_rng(const SynthConfig& cfg, int user, std::uint64_t concern) {
  return Rng(derive_seed(derive_seed(cfg.seed, 0x1000 + user), concern));
}

struct Dwell {
  std::int64_t t0 = 0;
  std::int64_t t1 = 0;
  CellId cell;
};

struct Move {
  std::int64_t t0 = 0;
  std::int64_t t1 = 0;
  CellId from;
  CellId to;
};

struct Layout {
  std::vector<CellId> home_cells;
  std::vector<CellId> work_cells;       // flat pool (control mode)
  std::vector<std::vector<CellId>> zones;  // adjacent-cell groups
  std::vector<CellId> poi_cells;        // errand destinations
};

Layout make_layout(const SynthConfig& cfg) {
  Layout layout;
  Rng rng(derive_seed(cfg.seed, kLayoutSalt));

  if (cfg.work_clusters) {
    // Contiguous residential patch around the origin.
    std::vector<CellId> patch = grid_disk(CellId{0, 0}, 2);
    rng.shuffle(patch);
    const int n_homes =
        std::min<int>(cfg.n_home_cells, static_cast<int>(patch.size()));
    layout.home_cells.assign(patch.begin(), patch.begin() + n_homes);

    // Four work zones well clear of the homes and of each other; each zone
    // is a center cell plus its six neighbours.
    const CellId centers[] = {{7, 0}, {0, 7}, {-7, 3}, {3, -7}};
    for (const CellId& center : centers) {
      std::vector<CellId> zone = grid_disk(center, 1);
      layout.zones.push_back(zone);
      layout.work_cells.insert(layout.work_cells.end(), zone.begin(),
                               zone.end());
    }
  } else {
    // Sublattice {3a, 3b}: every pair of picked cells is at hex distance
    // >= 3, so no two populated cells are neighbours.
    std::vector<CellId> sparse;
    for (const CellId& c : grid_disk(CellId{0, 0}, 3))
      sparse.push_back(CellId{3 * c.q, 3 * c.r});
    rng.shuffle(sparse);
    const int n_homes =
        std::min<int>(cfg.n_home_cells, static_cast<int>(sparse.size()) - 8);
    layout.home_cells.assign(sparse.begin(), sparse.begin() + n_homes);
    layout.work_cells.assign(sparse.begin() + n_homes, sparse.end());
  }

  layout.poi_cells = layout.home_cells;
  layout.poi_cells.insert(layout.poi_cells.end(), layout.work_cells.begin(),
                          layout.work_cells.end());
  return layout;
}

// Shared AR(1) day factor per work zone. Control mode draws a fresh
// independent factor per user per day instead (see below).
std::vector<std::vector<double>> zone_day_factors(const SynthConfig& cfg,
                                                  std::size_t n_zones) {
  constexpr double kPhi = 0.7;
  constexpr double kSigma = 0.18;
  Rng rng(derive_seed(cfg.seed, kFactorSalt));
  std::vector<std::vector<double>> factors(n_zones);
  for (auto& series : factors) {
    double z = rng.normal() * kSigma / std::sqrt(1.0 - kPhi * kPhi);
    series.reserve(cfg.n_days);
    for (int d = 0; d < cfg.n_days; ++d) {
      series.push_back(z);
      z = kPhi * z + kSigma * rng.normal();
    }
  }
  return factors;
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Errand departure hour in [9, 22), weighted by a sinusoid peaking mid
// afternoon; strength 0 degenerates to uniform.
double errand_hour(Rng& rng, double strength) {
  for (;;) {
    const double h = rng.uniform(9.0, 22.0);
    const double w =
        (1.0 + strength * std::sin(M_PI * (h - 9.0) / 13.0)) /
        (1.0 + strength);
    if (rng.uniform() < w) return h;
  }
}

struct UserPlan {
  std::vector<Dwell> dwells;
  std::vector<Move> moves;
};

UserPlan plan_user(const SynthConfig& cfg, const Layout& layout, int user,
                   const std::vector<std::vector<double>>& zone_factors) {
  Rng rng = user_rng(cfg, user, kUserSched);

  const CellId home =
      layout.home_cells[rng.uniform_int(layout.home_cells.size())];
  std::size_t zone = 0;
  CellId work;
  if (cfg.work_clusters) {
    zone = rng.uniform_int(layout.zones.size());
    work = layout.zones[zone][rng.uniform_int(layout.zones[zone].size())];
  } else {
    work = layout.work_cells[rng.uniform_int(layout.work_cells.size())];
  }

  const std::int64_t sim_end = static_cast<std::int64_t>(cfg.n_days) * kDay;
  UserPlan plan;
  std::int64_t at_home_since = 0;
  CellId here = home;

  auto travel = [&](std::int64_t depart, CellId from, CellId to) {
    const std::int64_t arrive =
        depart + 900 + static_cast<std::int64_t>(rng.uniform_int(900));
    plan.moves.push_back(Move{depart, arrive, from, to});
    return arrive;
  };
  auto leave_home = [&](std::int64_t depart, CellId to) {
    plan.dwells.push_back(Dwell{at_home_since, depart, home});
    here = to;
    return travel(depart, home, to);
  };
  auto return_home = [&](std::int64_t depart) {
    at_home_since = travel(depart, here, home);
    here = home;
  };

  for (int d = 0; d < cfg.n_days; ++d) {
    const std::int64_t base = static_cast<std::int64_t>(d) * kDay;

    // Day factor: shared AR(1) per zone, or an independent memoryless draw.
    const double z = cfg.work_clusters ? zone_factors[zone][d]
                                       : 0.25 * rng.normal();
    const double attend_p = clamp01(0.8 + 0.7 * z);

    std::int64_t free_from = at_home_since;
    if (rng.bernoulli(attend_p)) {
      const std::int64_t dep =
          base + 27000 + static_cast<std::int64_t>(rng.uniform(-2700, 2700));
      if (dep > at_home_since + 600) {
        std::int64_t t = leave_home(dep, work);
        plan.dwells.push_back(
            Dwell{t, base + 61200 +
                         static_cast<std::int64_t>(rng.uniform(-1800, 1800)),
                  work});
        return_home(plan.dwells.back().t1);
        free_from = at_home_since;
      }
    }

    // Evening errands to random points of interest.
    const int n_err = std::max(
        0, static_cast<int>(std::lround(2.0 + cfg.noise_std * rng.normal())));
    for (int e = 0; e < n_err; ++e) {
      const double hod = errand_hour(rng, cfg.daily_period_strength);
      const std::int64_t dep =
          base + static_cast<std::int64_t>(hod * 3600.0);
      if (dep < free_from + 600 || dep > base + kDay - 7200) continue;
      CellId dest = layout.poi_cells[rng.uniform_int(layout.poi_cells.size())];
      if (dest == home) continue;
      std::int64_t t = leave_home(dep, dest);
      const std::int64_t leave =
          t + 2400 + static_cast<std::int64_t>(rng.uniform_int(2400));
      plan.dwells.push_back(Dwell{t, leave, dest});
      return_home(leave);
      free_from = at_home_since;
    }
  }
  plan.dwells.push_back(Dwell{at_home_since, sim_end, home});
  return plan;
}

// Fixed per-user anchor inside a cell, so repeated dwells cluster tightly.
PlanarPoint cell_anchor(CellId cell, const SynthConfig& cfg, Rng& rng) {
  const PlanarPoint center = cell_center_planar(cell, cfg.grid);
  const double radius = 0.25 * cfg.grid.edge_length_m * std::sqrt(rng.uniform());
  const double angle = rng.uniform(0.0, 2.0 * M_PI);
  return PlanarPoint{center.x + radius * std::cos(angle),
                     center.y + radius * std::sin(angle)};
}

GeoPoint jittered(const PlanarPoint& anchor, const SynthConfig& cfg,
                  Rng& rng) {
  const double radius = 20.0 * std::sqrt(rng.uniform());
  const double angle = rng.uniform(0.0, 2.0 * M_PI);
  return unproject(PlanarPoint{anchor.x + radius * std::cos(angle),
                               anchor.y + radius * std::sin(angle)},
                   cfg.grid);
}

std::string user_name(int user) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%04d", user);
  return buf;
}

}  // namespace

std::vector<Ping> generate_pings(const SynthConfig& cfg) {
  cfg.validate();
  const Layout layout = make_layout(cfg);
  const auto zone_factors =
      cfg.work_clusters
          ? zone_day_factors(cfg, layout.zones.size())
          : std::vector<std::vector<double>>{};

  const std::int64_t total_hours =
      static_cast<std::int64_t>(cfg.n_days) * 24;
  std::vector<Ping> pings;
  for (int u = 0; u < cfg.n_users; ++u) {
    const UserPlan plan = plan_user(cfg, layout, u, zone_factors);

    Rng silence_rng = user_rng(cfg, u, kUserSilence);
    std::vector<bool> silent(total_hours);
    for (std::int64_t h = 0; h < total_hours; ++h)
      silent[h] = silence_rng.bernoulli(cfg.sparsity);
    auto audible = [&](std::int64_t t) {
      const std::int64_t h = t / 3600;
      return h >= 0 && h < total_hours && !silent[h];
    };

    Rng ping_rng = user_rng(cfg, u, kUserPings);
    const std::string name = user_name(u);
    std::vector<Ping> mine;

    std::map<CellId, PlanarPoint> anchors;
    auto anchor_of = [&](CellId cell) {
      auto it = anchors.find(cell);
      if (it == anchors.end())
        it = anchors.emplace(cell, cell_anchor(cell, cfg, ping_rng)).first;
      return it->second;
    };

    for (const Dwell& dwell : plan.dwells) {
      const PlanarPoint anchor = anchor_of(dwell.cell);
      std::int64_t t = dwell.t0;
      while (t < dwell.t1) {
        if (audible(t)) {
          const GeoPoint g = jittered(anchor, cfg, ping_rng);
          mine.push_back(Ping{name, kSimStart + t, g.lat, g.lon,
                              HealthStatus::kHealthy});
        }
        t += 60 + static_cast<std::int64_t>(ping_rng.uniform_int(121));
      }
    }
    for (const Move& move : plan.moves) {
      const PlanarPoint a = cell_center_planar(move.from, cfg.grid);
      const PlanarPoint b = cell_center_planar(move.to, cfg.grid);
      const int n = 1 + static_cast<int>(ping_rng.uniform_int(3));
      for (int i = 0; i < n; ++i) {
        const double frac = (i + 1.0) / (n + 1.0);
        const std::int64_t t =
            move.t0 + static_cast<std::int64_t>(frac * (move.t1 - move.t0));
        const GeoPoint g = unproject(
            PlanarPoint{a.x + frac * (b.x - a.x), a.y + frac * (b.y - a.y)},
            cfg.grid);
        if (audible(t))
          mine.push_back(Ping{name, kSimStart + t, g.lat, g.lon,
                              HealthStatus::kHealthy});
      }
    }

    std::stable_sort(mine.begin(), mine.end(),
                     [](const Ping& a, const Ping& b) {
                       return a.timestamp < b.timestamp;
                     });
    pings.insert(pings.end(), mine.begin(), mine.end());
  }
  return pings;
}

RadianceRaster generate_raster(const SynthConfig& cfg) {
  cfg.validate();
  const Layout layout = make_layout(cfg);
  const double pitch = cell_pitch_m(cfg.grid);

  struct Blob {
    PlanarPoint center;
    double peak;
    double sigma;
  };
  Rng rng(derive_seed(cfg.seed, kRasterSalt));
  std::vector<Blob> blobs;
  if (cfg.work_clusters) {
    blobs.push_back(
        Blob{cell_center_planar(CellId{0, 0}, cfg.grid), 12.0, 1.6 * pitch});
    for (const auto& zone : layout.zones)
      blobs.push_back(Blob{cell_center_planar(zone[zone.size() / 2], cfg.grid),
                           11.0 + rng.uniform(0.0, 2.0), 1.2 * pitch});
  } else {
    for (const CellId& cell : layout.home_cells)
      blobs.push_back(Blob{cell_center_planar(cell, cfg.grid),
                           11.0 + rng.uniform(0.0, 2.0), 0.8 * pitch});
    for (const CellId& cell : layout.work_cells)
      blobs.push_back(Blob{cell_center_planar(cell, cfg.grid),
                           11.0 + rng.uniform(0.0, 2.0), 0.8 * pitch});
  }

  RadianceRaster raster;
  for (const CellId& cell : grid_disk(CellId{0, 0}, 11)) {
    const PlanarPoint p = cell_center_planar(cell, cfg.grid);
    double v = 1.0 + 0.2 * rng.uniform();
    for (const Blob& blob : blobs) {
      const double dx = p.x - blob.center.x;
      const double dy = p.y - blob.center.y;
      v += blob.peak *
           std::exp(-(dx * dx + dy * dy) / (2.0 * blob.sigma * blob.sigma));
    }
    raster.values[cell] = v;
  }
  return raster;
}

}  // namespace hexflow
