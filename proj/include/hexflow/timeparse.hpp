#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hexflow {

// ISO-8601 UTC timestamps ("2020-04-01T06:30:00Z") to and from Unix seconds.
// Civil-date arithmetic is proleptic Gregorian, no leap seconds.

std::optional<std::int64_t> parse_iso8601_utc(std::string_view text);
std::string format_iso8601_utc(std::int64_t unix_seconds);

}  // namespace hexflow
