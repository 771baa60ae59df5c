#include "doctest.h"

#include <sstream>
#include <string>

#include "hexflow/error.hpp"
#include "hexflow/ingest.hpp"

using namespace hexflow;

namespace {

const std::string kHeader = "user_id,timestamp,lat,lon,status\n";

std::string row(const std::string& user, const std::string& iso, double lat,
                double lon, const std::string& status = "healthy") {
  std::ostringstream os;
  os << user << ',' << iso << ',' << lat << ',' << lon << ',' << status
     << '\n';
  return os.str();
}

}  // namespace

TEST_CASE("well-formed rows parse into pings in file order") {
  std::istringstream in(kHeader +
                        row("ua", "2024-03-04T08:00:00Z", 40.71, -74.0) +
                        row("ub", "2024-03-04T07:00:00Z", 40.72, -74.01,
                            "infected") +
                        row("ua", "2024-03-04T09:00:00Z", 40.73, -74.02,
                            "unknown"));
  const ParseResult r = parse_pings(in);
  CHECK(r.skipped_rows == 0);
  REQUIRE(r.pings.size() == 3);
  CHECK(r.pings[0].user_id == "ua");
  CHECK(r.pings[0].timestamp == 1709539200);
  CHECK(r.pings[0].lat == doctest::Approx(40.71));
  CHECK(r.pings[0].status == HealthStatus::kHealthy);
  CHECK(r.pings[1].status == HealthStatus::kInfected);
  CHECK(r.pings[2].status == HealthStatus::kUnknown);
}

TEST_CASE("header mismatch and empty stream are input errors") {
  std::istringstream empty("");
  CHECK_THROWS_AS(parse_pings(empty), InputError);
  std::istringstream wrong("id,time,lat,lon\n");
  CHECK_THROWS_AS(parse_pings(wrong), InputError);
}

TEST_CASE("malformed rows are skipped and counted") {
  std::istringstream in(
      kHeader + row("ua", "2024-03-04T08:00:00Z", 40.71, -74.0) +
      "ub,not-a-time,40.7,-74.0,healthy\n" +
      "uc,2024-03-04T08:00:00Z,91.5,-74.0,healthy\n" +   // lat out of range
      "ud,2024-03-04T08:00:00Z,40.7,-200.0,healthy\n" +  // lon out of range
      "ue,2024-03-04T08:00:00Z,40.7,-74.0,sick\n" +      // unknown status
      "uf,2024-03-04T08:00:00Z,40.7\n" +                 // missing fields
      row("ug", "2024-03-04T09:00:00Z", 40.70, -74.1) +
      row("uh", "2024-03-04T10:00:00Z", 40.70, -74.1) +
      row("ui", "2024-03-04T11:00:00Z", 40.70, -74.1) +
      row("uj", "2024-03-04T12:00:00Z", 40.70, -74.1) +
      row("uk", "2024-03-04T13:00:00Z", 40.70, -74.1));
  const ParseResult r = parse_pings(in);
  CHECK(r.pings.size() == 6);
  CHECK(r.skipped_rows == 5);
}

TEST_CASE("mostly-garbage input raises a data error") {
  std::string text = kHeader;
  for (int i = 0; i < 7; ++i) text += "junk,row,here,not,valid\n";
  for (int i = 0; i < 5; ++i)
    text += row("ua", "2024-03-04T08:00:00Z", 40.7, -74.0);
  std::istringstream in(text);
  CHECK_THROWS_AS(parse_pings(in), DataError);

  // Exactly half malformed is still tolerated.
  std::string half = kHeader;
  for (int i = 0; i < 5; ++i) half += "junk,row,here,not,valid\n";
  for (int i = 0; i < 5; ++i)
    half += row("ua", "2024-03-04T08:00:00Z", 40.7, -74.0);
  std::istringstream in2(half);
  CHECK(parse_pings(in2).skipped_rows == 5);
}

TEST_CASE("blank lines are neither parsed nor counted as malformed") {
  std::istringstream in(kHeader + "\n" +
                        row("ua", "2024-03-04T08:00:00Z", 40.7, -74.0) +
                        "\n");
  const ParseResult r = parse_pings(in);
  CHECK(r.pings.size() == 1);
  CHECK(r.skipped_rows == 0);
}

TEST_CASE("active-user filter enforces the record floor inside the window") {
  std::vector<Ping> pings;
  // 30 in-window pings for ua, 29 for ub, 30 for uc but one outside.
  for (int i = 0; i < 30; ++i)
    pings.push_back(Ping{"ua", 1000 + i, 40.7, -74.0, HealthStatus::kHealthy});
  for (int i = 0; i < 29; ++i)
    pings.push_back(Ping{"ub", 1000 + i, 40.7, -74.0, HealthStatus::kHealthy});
  for (int i = 0; i < 29; ++i)
    pings.push_back(Ping{"uc", 1000 + i, 40.7, -74.0, HealthStatus::kHealthy});
  pings.push_back(Ping{"uc", 2000, 40.7, -74.0, HealthStatus::kHealthy});

  StudyWindow w{1000, 1100, 30};
  const auto by_user = filter_active(pings, w);
  REQUIRE(by_user.size() == 1);
  CHECK(by_user.count("ua") == 1);
  CHECK(by_user.at("ua").size() == 30);
}

TEST_CASE("window bounds are start-inclusive and end-exclusive") {
  std::vector<Ping> pings;
  pings.push_back(Ping{"ua", 999, 40.7, -74.0, HealthStatus::kHealthy});
  pings.push_back(Ping{"ua", 1000, 40.7, -74.0, HealthStatus::kHealthy});
  pings.push_back(Ping{"ua", 1099, 40.7, -74.0, HealthStatus::kHealthy});
  pings.push_back(Ping{"ua", 1100, 40.7, -74.0, HealthStatus::kHealthy});
  StudyWindow w{1000, 1100, 1};
  const auto by_user = filter_active(pings, w);
  REQUIRE(by_user.count("ua") == 1);
  REQUIRE(by_user.at("ua").size() == 2);
  CHECK(by_user.at("ua").front().timestamp == 1000);
  CHECK(by_user.at("ua").back().timestamp == 1099);
}

TEST_CASE("retained pings are sorted by time with stable ties") {
  std::vector<Ping> pings;
  pings.push_back(Ping{"ua", 30, 1.0, 0.0, HealthStatus::kHealthy});
  pings.push_back(Ping{"ua", 10, 2.0, 0.0, HealthStatus::kHealthy});
  pings.push_back(Ping{"ua", 20, 3.0, 0.0, HealthStatus::kHealthy});
  pings.push_back(Ping{"ua", 10, 4.0, 0.0, HealthStatus::kHealthy});
  StudyWindow w{0, 100, 1};
  const auto by_user = filter_active(pings, w);
  const auto& list = by_user.at("ua");
  REQUIRE(list.size() == 4);
  CHECK(list[0].lat == 2.0);  // first 10 from file order
  CHECK(list[1].lat == 4.0);  // second 10
  CHECK(list[2].lat == 3.0);
  CHECK(list[3].lat == 1.0);
}

TEST_CASE("filtering is idempotent") {
  std::vector<Ping> pings;
  for (int i = 0; i < 40; ++i)
    pings.push_back(
        Ping{"ua", 1000 + 37 * ((i * 13) % 40), 40.7, -74.0,
             HealthStatus::kHealthy});
  StudyWindow w{0, 100000, 30};
  const auto once = filter_active(pings, w);
  const auto twice = filter_active(once.at("ua"), w);
  REQUIRE(twice.count("ua") == 1);
  const auto& a = once.at("ua");
  const auto& b = twice.at("ua");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].timestamp == b[i].timestamp);
}

TEST_CASE("ping CSV writing round-trips through the parser") {
  std::vector<Ping> pings;
  pings.push_back(
      Ping{"ua", 1709539200, 40.712345, -74.006789, HealthStatus::kHealthy});
  pings.push_back(
      Ping{"ub", 1709542800, 40.75, -73.99, HealthStatus::kInfected});
  std::ostringstream out;
  write_pings_csv(out, pings);
  std::istringstream in(out.str());
  const ParseResult r = parse_pings(in);
  REQUIRE(r.pings.size() == 2);
  CHECK(r.pings[0].user_id == "ua");
  CHECK(r.pings[0].timestamp == 1709539200);
  CHECK(r.pings[0].lat == 40.712345);
  CHECK(r.pings[0].lon == -74.006789);
  CHECK(r.pings[1].status == HealthStatus::kInfected);
}

TEST_CASE("study window validation") {
  CHECK_THROWS_AS((StudyWindow{100, 100, 30}.validate()), ConfigError);
  CHECK_THROWS_AS((StudyWindow{0, 100, 0}.validate()), ConfigError);
  CHECK_NOTHROW((StudyWindow{0, 100, 1}.validate()));
}
