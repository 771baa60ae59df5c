#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hexflow {

// Minimal CSV helpers. The formats used by this pipeline never quote fields,
// so a plain comma split is the whole grammar.

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline std::optional<double> parse_double(std::string_view s) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

inline std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t value = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

// Shortest round-trip decimal form; deterministic across runs.
inline std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = 0.0;
  std::from_chars(buf, buf + n, back);
  if (back == v) {
    for (int prec = 1; prec <= 16; ++prec) {
      char shorter[32];
      const int m = std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
      double value = 0.0;
      std::from_chars(shorter, shorter + m, value);
      if (value == v) return shorter;
    }
  }
  return buf;
}

// Strip a single trailing '\r' (files written on Windows).
inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

// In-place variant for getline loops.
inline void chomp_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace hexflow
