#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "hexflow/hexgrid.hpp"
#include "hexflow/stops.hpp"

namespace hexflow {

struct ODKey {
  std::int64_t hour = 0;  // flat hour index since the epoch
  CellId src;
  CellId dst;

  friend auto operator<=>(const ODKey&, const ODKey&) = default;
};

// Sparse hourly origin-destination counts. Absent keys mean zero.
struct ODCube {
  std::map<ODKey, std::int64_t> entries;
  std::int64_t hours = 0;        // max observed hour index + 1
  std::vector<CellId> cells;     // sorted, duplicate-free

  std::int64_t total_transitions() const;
};

// Dense per-hour per-cell flow. Row t corresponds to absolute hour index
// start_hour + t; columns follow `cells` order.
struct FlowSeries {
  Eigen::MatrixXd values;     // hours x cells
  std::vector<CellId> cells;  // sorted
  std::int64_t start_hour = 0;

  std::int64_t hours() const { return values.rows(); }
  std::int64_t cell_count() const { return values.cols(); }
};

// Counts one transition per consecutive stop pair of each user, keyed by the
// departure hour of the first stop: hour = floor((departure - epoch)/3600).
// Throws std::out_of_range when a keyed stop departs before the epoch.
ODCube build_od(const std::map<std::string, std::vector<Stop>>& stops_by_user,
                std::int64_t epoch);

// Destination marginal (IN) and source marginal (OUT), both hours x cells.
std::pair<FlowSeries, FlowSeries> aggregate_in_out(const ODCube& od);

// Element-wise IN + OUT. Throws std::invalid_argument on mismatched shape.
FlowSeries total_flow(const FlowSeries& in, const FlowSeries& out);

// Total-flow matrix restricted to cell_filter (all cells when absent), rows
// spanning [min, max] observed hour, zero-filled gaps. Throws DataError when
// the cube has no entries.
FlowSeries densify(const ODCube& od,
                   const std::optional<std::set<CellId>>& cell_filter = {});

// hour_index,src_cell,dst_cell,count
void write_od_csv(std::ostream& out, const ODCube& od);
ODCube read_od_csv(std::istream& in);

// hour_index,<cell>,... one column per cell.
void write_flow_csv(std::ostream& out, const FlowSeries& series);
FlowSeries read_flow_csv(std::istream& in);

// stops CSV: user_id,cell,medoid_lat,medoid_lon,arrival_iso,departure_iso
void write_stops_csv(std::ostream& out, const std::vector<Stop>& stops);
std::vector<Stop> read_stops_csv(std::istream& in);

}  // namespace hexflow
