#include "doctest.h"

#include <cstdint>

#include "hexflow/csv.hpp"
#include "hexflow/rng.hpp"
#include "hexflow/timeparse.hpp"

using namespace hexflow;

TEST_CASE("known timestamps parse to the right epoch seconds") {
  CHECK(parse_iso8601_utc("1970-01-01T00:00:00Z") == 0);
  CHECK(parse_iso8601_utc("2020-04-01T06:30:00Z") == 1585722600);
  CHECK(parse_iso8601_utc("2024-03-04T00:00:00Z") == 1709510400);
  CHECK(parse_iso8601_utc("2000-02-29T23:59:59Z") == 951868799);
  CHECK(parse_iso8601_utc("1969-12-31T23:59:59Z") == -1);
}

TEST_CASE("formatting inverts parsing across a wide range") {
  CHECK(format_iso8601_utc(0) == "1970-01-01T00:00:00Z");
  CHECK(format_iso8601_utc(1709510400) == "2024-03-04T00:00:00Z");
  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    // 1930..2100, covering negative epochs and century leap rules.
    const std::int64_t t =
        -1262304000 + static_cast<std::int64_t>(rng.uniform_int(4102444800ULL));
    const auto back = parse_iso8601_utc(format_iso8601_utc(t));
    REQUIRE(back.has_value());
    CHECK(*back == t);
  }
}

TEST_CASE("malformed timestamps are rejected") {
  CHECK_FALSE(parse_iso8601_utc("").has_value());
  CHECK_FALSE(parse_iso8601_utc("2020-04-01 06:30:00Z").has_value());
  CHECK_FALSE(parse_iso8601_utc("2020-04-01T06:30:00").has_value());
  CHECK_FALSE(parse_iso8601_utc("2020-04-01T06:30Z").has_value());
  CHECK_FALSE(parse_iso8601_utc("2020-13-01T00:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601_utc("2020-04-31T00:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601_utc("2019-02-29T00:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601_utc("2020-04-01T24:00:00Z").has_value());
  CHECK_FALSE(parse_iso8601_utc("2020-04-01T00:60:00Z").has_value());
  CHECK_FALSE(parse_iso8601_utc("garbage").has_value());
}

TEST_CASE("csv line splitting keeps empty fields") {
  const auto fields = split_csv_line("a,,c");
  REQUIRE(fields.size() == 3);
  CHECK(fields[0] == "a");
  CHECK(fields[1] == "");
  CHECK(fields[2] == "c");
  CHECK(split_csv_line("").size() == 1);
  CHECK(split_csv_line("x").size() == 1);
}

TEST_CASE("numeric field parsing is strict") {
  CHECK(parse_int("42") == 42);
  CHECK(parse_int("-7") == -7);
  CHECK_FALSE(parse_int("4.2").has_value());
  CHECK_FALSE(parse_int("42x").has_value());
  CHECK_FALSE(parse_int("").has_value());
  CHECK(parse_double("1.5") == 1.5);
  CHECK(parse_double("-0.25") == -0.25);
  CHECK_FALSE(parse_double("1.5.2").has_value());
  CHECK_FALSE(parse_double("").has_value());
}

TEST_CASE("format_double round-trips exactly") {
  Rng rng(22);
  for (int i = 0; i < 5000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-8, 8));
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(parse_double(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("carriage returns are stripped") {
  CHECK(strip_cr("abc\r") == "abc");
  CHECK(strip_cr("abc") == "abc");
  std::string s = "row\r";
  chomp_cr(s);
  CHECK(s == "row");
}
