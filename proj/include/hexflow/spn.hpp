#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "hexflow/odcube.hpp"

namespace hexflow {

// Three aligned channels over the same hours x cells frame: the raw flow,
// the neighbour-median estimate, and their element-wise mean.
struct FeatureTensor {
  Eigen::MatrixXd raw;
  Eigen::MatrixXd med;
  Eigen::MatrixXd mean;
  std::vector<CellId> cells;
  std::int64_t start_hour = 0;
  double alpha = 0.5;

  std::int64_t hours() const { return raw.rows(); }
  std::int64_t cell_count() const { return raw.cols(); }
};

// Median of the strictly positive flows among the cell's six hex neighbours
// restricted to cells present in `cells` (columns of `row`). An even count
// takes the mean of the two middle values. When no neighbour has nonzero
// flow the cell's own value is returned unchanged.
// Throws std::out_of_range when `cell` is not a column of the frame.
double neighbor_median(const Eigen::RowVectorXd& row,
                       const std::vector<CellId>& cells, const CellId& cell);

// Neighbour-median channel for a full series, one snapshot per row.
Eigen::MatrixXd neighbor_median_all(const FlowSeries& series);

// Builds the three-channel tensor [raw, med, (raw+med)/2].
FeatureTensor fuse(const FlowSeries& series);

// Smoothed target alpha*raw + (1-alpha)*med.
Eigen::MatrixXd smooth_target(const Eigen::MatrixXd& raw,
                              const Eigen::MatrixXd& med, double alpha);

// Evaluates `score` (lower is better) for alpha in {1.0, 0.9, ..., 0.0} and
// returns the winner; ties keep the larger alpha.
double grid_search_alpha(const std::function<double(double)>& score);

// Feature CSV trio plus a small JSON sidecar {alpha, channel_order}.
void write_feature_csvs(const std::string& path_prefix,
                        const FeatureTensor& tensor);
FeatureTensor read_feature_csvs(const std::string& path_prefix);

}  // namespace hexflow
