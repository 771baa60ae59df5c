#include "hexflow/timeparse.hpp"

#include <charconv>
#include <cstdio>

namespace hexflow {
namespace {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y += (m <= 2);
}

int days_in_month(int year, int month) {
  static constexpr int kLengths[] = {31, 28, 31, 30, 31, 30,
                                     31, 31, 30, 31, 30, 31};
  if (month == 2) {
    const bool leap =
        year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
    return leap ? 29 : 28;
  }
  return kLengths[month - 1];
}

bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len,
                      int& out) {
  if (pos + len > s.size()) return false;
  int value = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    const char c = s[i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

}  // namespace

std::optional<std::int64_t> parse_iso8601_utc(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ, exactly 20 characters.
  if (text.size() != 20) return std::nullopt;
  int year, month, day, hour, minute, second;
  if (!parse_fixed_uint(text, 0, 4, year)) return std::nullopt;
  if (text[4] != '-') return std::nullopt;
  if (!parse_fixed_uint(text, 5, 2, month)) return std::nullopt;
  if (text[7] != '-') return std::nullopt;
  if (!parse_fixed_uint(text, 8, 2, day)) return std::nullopt;
  if (text[10] != 'T') return std::nullopt;
  if (!parse_fixed_uint(text, 11, 2, hour)) return std::nullopt;
  if (text[13] != ':') return std::nullopt;
  if (!parse_fixed_uint(text, 14, 2, minute)) return std::nullopt;
  if (text[16] != ':') return std::nullopt;
  if (!parse_fixed_uint(text, 17, 2, second)) return std::nullopt;
  if (text[19] != 'Z') return std::nullopt;

  if (month < 1 || month > 12) return std::nullopt;
  if (day < 1 || day > days_in_month(year, month)) return std::nullopt;
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;

  return days_from_civil(year, month, day) * 86400 + hour * 3600 +
         minute * 60 + second;
}

std::string format_iso8601_utc(std::int64_t unix_seconds) {
  std::int64_t days = unix_seconds / 86400;
  std::int64_t rem = unix_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  std::int64_t year;
  int month, day;
  civil_from_days(days, year, month, day);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02lld:%02lld:%02lldZ",
                static_cast<long long>(year), month, day,
                static_cast<long long>(rem / 3600),
                static_cast<long long>((rem % 3600) / 60),
                static_cast<long long>(rem % 60));
  return buf;
}

}  // namespace hexflow
