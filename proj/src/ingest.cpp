#include "hexflow/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hexflow/csv.hpp"
#include "hexflow/error.hpp"
#include "hexflow/timeparse.hpp"

namespace hexflow {
namespace {

std::optional<HealthStatus> parse_status(std::string_view s) {
  if (s == "healthy") return HealthStatus::kHealthy;
  if (s == "infected") return HealthStatus::kInfected;
  if (s == "unknown") return HealthStatus::kUnknown;
  return std::nullopt;
}

constexpr std::string_view kHeader = "user_id,timestamp,lat,lon,status";

}  // namespace

const char* to_string(HealthStatus s) {
  switch (s) {
    case HealthStatus::kHealthy:
      return "healthy";
    case HealthStatus::kInfected:
      return "infected";
    case HealthStatus::kUnknown:
      return "unknown";
  }
  return "unknown";
}

void StudyWindow::validate() const {
  if (start >= end) throw ConfigError("study window: start must precede end");
  if (min_records < 1) throw ConfigError("study window: min_records >= 1");
}

ParseResult parse_pings(std::istream& in) {
  if (!in.good()) throw InputError("ping stream unreadable");

  std::string line;
  if (!std::getline(in, line)) {
    if (in.bad()) throw InputError("ping stream unreadable");
    throw InputError("ping CSV is empty (missing header)");
  }
  if (strip_cr(line) != kHeader)
    throw InputError("ping CSV header mismatch, expected '" +
                     std::string(kHeader) + "'");

  ParseResult result;
  std::size_t data_rows = 0;
  while (std::getline(in, line)) {
    const std::string_view row = strip_cr(line);
    if (row.empty()) continue;
    ++data_rows;

    const auto fields = split_csv_line(row);
    if (fields.size() != 5) {
      ++result.skipped_rows;
      continue;
    }
    const auto ts = parse_iso8601_utc(fields[1]);
    const auto lat = parse_double(fields[2]);
    const auto lon = parse_double(fields[3]);
    const auto status = parse_status(fields[4]);
    const bool coords_ok = lat && lon && std::abs(*lat) <= 90.0 &&
                           std::abs(*lon) <= 180.0 && std::isfinite(*lat) &&
                           std::isfinite(*lon);
    if (fields[0].empty() || !ts || !coords_ok || !status) {
      ++result.skipped_rows;
      continue;
    }
    result.pings.push_back(
        Ping{std::string(fields[0]), *ts, *lat, *lon, *status});
  }
  if (in.bad()) throw InputError("ping stream unreadable");

  if (data_rows > 0 && result.skipped_rows * 2 > data_rows)
    throw DataError("ping CSV corrupt: " + std::to_string(result.skipped_rows) +
                    " of " + std::to_string(data_rows) + " rows malformed");
  return result;
}

std::map<std::string, std::vector<Ping>> filter_active(
    const std::vector<Ping>& pings, const StudyWindow& w) {
  w.validate();
  std::map<std::string, std::vector<Ping>> grouped;
  for (const Ping& p : pings) {
    if (p.timestamp >= w.start && p.timestamp < w.end)
      grouped[p.user_id].push_back(p);
  }
  for (auto it = grouped.begin(); it != grouped.end();) {
    if (it->second.size() < static_cast<std::size_t>(w.min_records)) {
      it = grouped.erase(it);
    } else {
      // stable: equal timestamps keep file order
      std::stable_sort(it->second.begin(), it->second.end(),
                       [](const Ping& a, const Ping& b) {
                         return a.timestamp < b.timestamp;
                       });
      ++it;
    }
  }
  return grouped;
}

void write_pings_csv(std::ostream& out, const std::vector<Ping>& pings) {
  out << kHeader << "\n";
  for (const Ping& p : pings) {
    out << p.user_id << ',' << format_iso8601_utc(p.timestamp) << ','
        << format_double(p.lat) << ',' << format_double(p.lon) << ','
        << to_string(p.status) << "\n";
  }
}

void write_pings_csv(std::ostream& out,
                     const std::map<std::string, std::vector<Ping>>& by_user) {
  out << kHeader << "\n";
  for (const auto& [user, pings] : by_user) {
    for (const Ping& p : pings) {
      out << user << ',' << format_iso8601_utc(p.timestamp) << ','
          << format_double(p.lat) << ',' << format_double(p.lon) << ','
          << to_string(p.status) << "\n";
    }
  }
}

}  // namespace hexflow
