#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

namespace hexflow {

enum class HealthStatus { kHealthy, kInfected, kUnknown };

const char* to_string(HealthStatus s);

// One raw location record. user_id arrives already hashed upstream; the
// pipeline never re-hashes it.
struct Ping {
  std::string user_id;
  std::int64_t timestamp = 0;  // Unix seconds, UTC
  double lat = 0.0;
  double lon = 0.0;
  HealthStatus status = HealthStatus::kUnknown;
};

struct StudyWindow {
  std::int64_t start = 0;  // inclusive
  std::int64_t end = 0;    // exclusive
  int min_records = 30;

  void validate() const;  // throws ConfigError
};

struct ParseResult {
  std::vector<Ping> pings;  // file order
  std::size_t skipped_rows = 0;
};

// Parses "user_id,timestamp,lat,lon,status" CSV (ISO-8601 UTC timestamps).
// Malformed rows are counted and skipped. Throws InputError if the stream is
// unreadable or the header is wrong, DataError if more than half of the data
// rows are malformed.
ParseResult parse_pings(std::istream& in);

// Keeps users with at least w.min_records pings inside [w.start, w.end);
// each retained list is ascending by timestamp, ties kept in file order.
std::map<std::string, std::vector<Ping>> filter_active(
    const std::vector<Ping>& pings, const StudyWindow& w);

struct IngestStats {
  std::size_t total_records = 0;
  std::size_t total_users = 0;
  std::size_t active_users = 0;
  std::size_t skipped_rows = 0;
};

void write_pings_csv(std::ostream& out, const std::vector<Ping>& pings);
void write_pings_csv(std::ostream& out,
                     const std::map<std::string, std::vector<Ping>>& by_user);

}  // namespace hexflow
