#include "hexflow/odcube.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "hexflow/csv.hpp"
#include "hexflow/error.hpp"
#include "hexflow/timeparse.hpp"

namespace hexflow {

std::int64_t ODCube::total_transitions() const {
  std::int64_t total = 0;
  for (const auto& [key, count] : entries) total += count;
  return total;
}

ODCube build_od(const std::map<std::string, std::vector<Stop>>& stops_by_user,
                std::int64_t epoch) {
  ODCube cube;
  std::set<CellId> cell_set;
  std::int64_t max_hour = -1;
  for (const auto& [user, stops] : stops_by_user) {
    for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
      const Stop& from = stops[i];
      const Stop& to = stops[i + 1];
      if (from.departure < epoch) {
        throw std::out_of_range("stop departs before the flow epoch: user " +
                                user + " at " +
                                format_iso8601_utc(from.departure));
      }
      const std::int64_t hour = (from.departure - epoch) / 3600;
      ++cube.entries[ODKey{hour, from.cell, to.cell}];
      cell_set.insert(from.cell);
      cell_set.insert(to.cell);
      max_hour = std::max(max_hour, hour);
    }
  }
  cube.hours = max_hour + 1;
  cube.cells.assign(cell_set.begin(), cell_set.end());
  return cube;
}

namespace {

FlowSeries zero_series(const ODCube& od, std::int64_t start_hour,
                       std::int64_t n_hours) {
  FlowSeries series;
  series.cells = od.cells;
  series.start_hour = start_hour;
  series.values = Eigen::MatrixXd::Zero(n_hours, od.cells.size());
  return series;
}

std::unordered_map<CellId, Eigen::Index> column_index(
    const std::vector<CellId>& cells) {
  std::unordered_map<CellId, Eigen::Index> index;
  index.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i)
    index.emplace(cells[i], static_cast<Eigen::Index>(i));
  return index;
}

}  // namespace

std::pair<FlowSeries, FlowSeries> aggregate_in_out(const ODCube& od) {
  FlowSeries in = zero_series(od, 0, od.hours);
  FlowSeries out = zero_series(od, 0, od.hours);
  const auto col = column_index(od.cells);
  for (const auto& [key, count] : od.entries) {
    in.values(key.hour, col.at(key.dst)) += static_cast<double>(count);
    out.values(key.hour, col.at(key.src)) += static_cast<double>(count);
  }
  return {std::move(in), std::move(out)};
}

FlowSeries total_flow(const FlowSeries& in, const FlowSeries& out) {
  if (in.values.rows() != out.values.rows() ||
      in.values.cols() != out.values.cols() || in.cells != out.cells ||
      in.start_hour != out.start_hour) {
    throw std::invalid_argument("IN and OUT series shapes do not match");
  }
  FlowSeries total = in;
  total.values += out.values;
  return total;
}

FlowSeries densify(const ODCube& od,
                   const std::optional<std::set<CellId>>& cell_filter) {
  if (od.entries.empty()) throw DataError("cannot densify an empty OD cube");

  std::vector<CellId> kept;
  if (cell_filter) {
    for (const CellId& cell : od.cells)
      if (cell_filter->count(cell)) kept.push_back(cell);
  } else {
    kept = od.cells;
  }

  std::int64_t min_hour = od.entries.begin()->first.hour;
  std::int64_t max_hour = min_hour;
  for (const auto& [key, count] : od.entries) {
    min_hour = std::min(min_hour, key.hour);
    max_hour = std::max(max_hour, key.hour);
  }

  FlowSeries series;
  series.cells = kept;
  series.start_hour = min_hour;
  series.values =
      Eigen::MatrixXd::Zero(max_hour - min_hour + 1, kept.size());
  const auto col = column_index(kept);
  for (const auto& [key, count] : od.entries) {
    const std::int64_t row = key.hour - min_hour;
    auto src_it = col.find(key.src);
    if (src_it != col.end())
      series.values(row, src_it->second) += static_cast<double>(count);
    auto dst_it = col.find(key.dst);
    if (dst_it != col.end())
      series.values(row, dst_it->second) += static_cast<double>(count);
  }
  return series;
}

void write_od_csv(std::ostream& out, const ODCube& od) {
  out << "hour_index,src_cell,dst_cell,count\n";
  for (const auto& [key, count] : od.entries) {
    out << key.hour << ',' << key.src.str() << ',' << key.dst.str() << ','
        << count << '\n';
  }
}

ODCube read_od_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty OD file");
  chomp_cr(line);
  if (line != "hour_index,src_cell,dst_cell,count")
    throw InputError("unexpected OD header: " + line);

  ODCube cube;
  std::set<CellId> cell_set;
  std::int64_t max_hour = -1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw InputError("OD line " + std::to_string(line_no) +
                       ": expected 4 fields");
    const auto hour = parse_int(fields[0]);
    const auto src = CellId::parse(fields[1]);
    const auto dst = CellId::parse(fields[2]);
    const auto count = parse_int(fields[3]);
    if (!hour || !src || !dst || !count)
      throw InputError("OD line " + std::to_string(line_no) + ": bad field");
    ODKey key{*hour, *src, *dst};
    cube.entries[key] += *count;
    cell_set.insert(key.src);
    cell_set.insert(key.dst);
    max_hour = std::max(max_hour, key.hour);
  }
  cube.hours = max_hour + 1;
  cube.cells.assign(cell_set.begin(), cell_set.end());
  return cube;
}

void write_flow_csv(std::ostream& out, const FlowSeries& series) {
  out << "hour_index";
  for (const CellId& cell : series.cells) out << ',' << cell.str();
  out << '\n';
  for (Eigen::Index t = 0; t < series.values.rows(); ++t) {
    out << (series.start_hour + t);
    for (Eigen::Index c = 0; c < series.values.cols(); ++c)
      out << ',' << format_double(series.values(t, c));
    out << '\n';
  }
}

FlowSeries read_flow_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty flow file");
  chomp_cr(line);
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "hour_index")
    throw InputError("unexpected flow header");

  FlowSeries series;
  for (std::size_t i = 1; i < header.size(); ++i) {
    const auto cell = CellId::parse(header[i]);
    if (!cell)
      throw InputError("bad cell id in flow header: " +
                       std::string(header[i]));
    series.cells.push_back(*cell);
  }

  std::vector<std::vector<double>> rows;
  bool first = true;
  std::int64_t prev_hour = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw InputError("flow line " + std::to_string(line_no) +
                       ": field count mismatch");
    const auto hour = parse_int(fields[0]);
    if (!hour)
      throw InputError("flow line " + std::to_string(line_no) +
                       ": bad hour index");
    if (first) {
      series.start_hour = *hour;
      first = false;
    } else if (*hour != prev_hour + 1) {
      throw InputError("flow line " + std::to_string(line_no) +
                       ": hour indices must be contiguous");
    }
    prev_hour = *hour;
    std::vector<double> row(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      const auto v = parse_double(fields[i]);
      if (!v)
        throw InputError("flow line " + std::to_string(line_no) +
                         ": bad value");
      row[i - 1] = *v;
    }
    rows.push_back(std::move(row));
  }
  series.values.resize(rows.size(), series.cells.size());
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t c = 0; c < rows[t].size(); ++c)
      series.values(t, c) = rows[t][c];
  return series;
}

void write_stops_csv(std::ostream& out, const std::vector<Stop>& stops) {
  out << "user_id,cell,medoid_lat,medoid_lon,arrival_iso,departure_iso\n";
  for (const Stop& s : stops) {
    out << s.user_id << ',' << s.cell.str() << ','
        << format_double(s.medoid_lat) << ',' << format_double(s.medoid_lon)
        << ',' << format_iso8601_utc(s.arrival) << ','
        << format_iso8601_utc(s.departure) << '\n';
  }
}

std::vector<Stop> read_stops_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty stops file");
  chomp_cr(line);
  if (line != "user_id,cell,medoid_lat,medoid_lon,arrival_iso,departure_iso")
    throw InputError("unexpected stops header: " + line);

  std::vector<Stop> stops;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    chomp_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 6)
      throw InputError("stops line " + std::to_string(line_no) +
                       ": expected 6 fields");
    const auto cell = CellId::parse(fields[1]);
    const auto lat = parse_double(fields[2]);
    const auto lon = parse_double(fields[3]);
    const auto arrival = parse_iso8601_utc(fields[4]);
    const auto departure = parse_iso8601_utc(fields[5]);
    if (!cell || !lat || !lon || !arrival || !departure)
      throw InputError("stops line " + std::to_string(line_no) +
                       ": bad field");
    stops.push_back(Stop{std::string(fields[0]), *cell, *lat, *lon, *arrival,
                         *departure});
  }
  return stops;
}

}  // namespace hexflow
