#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "hexflow/odcube.hpp"

namespace hexflow {

struct WindowSpec {
  int lookback = 96;  // L
  int horizon = 48;   // T
  double train_frac = 0.70;
  double val_frac = 0.10;
  double test_frac = 0.20;

  void validate() const;  // throws ConfigError
};

// Target-start indices per split. A sample with target start s covers inputs
// [s-L, s) and targets [s, s+T); it belongs to the chronological segment
// containing s. Inputs may reach back across a segment boundary.
struct WindowSet {
  std::vector<int> train;
  std::vector<int> val;
  std::vector<int> test;

  std::size_t total() const {
    return train.size() + val.size() + test.size();
  }
};

// Segment boundaries: [0, floor(.7N)), [floor(.7N), floor(.8N)), rest.
std::pair<int, int> split_boundaries(std::int64_t n_hours,
                                     const WindowSpec& spec);

// Enumerates s in [L, N-T] into the three splits.
// Throws DataError when N < L + T.
WindowSet make_windows(std::int64_t n_hours, const WindowSpec& spec);

// Input channels and forecasting target on a shared hours x cells frame.
// channels[0] is always the raw flow; the SPN variant appends the neighbour
// median and the mean blend. The target is the smoothed series.
struct Dataset {
  std::vector<Eigen::MatrixXd> channels;
  Eigen::MatrixXd target;
  std::vector<CellId> cells;
  std::int64_t start_hour = 0;

  std::int64_t hours() const { return target.rows(); }
  std::int64_t cell_count() const { return target.cols(); }

  void validate() const;  // throws std::invalid_argument on shape mismatch
};

// Per-cell per-channel z-scoring fit on the train segment rows only. The
// target uses channel-0 statistics, so vanilla and SPN variants share one
// target scale.
struct Standardizer {
  std::vector<Eigen::RowVectorXd> mean;  // one 1 x M row per channel
  std::vector<Eigen::RowVectorXd> std;   // floored at 1e-8

  static Standardizer fit(const Dataset& ds, Eigen::Index train_rows);
  Dataset apply(const Dataset& ds) const;

  // Undo target standardization for one cell column.
  double destandardize_target(double z, Eigen::Index cell) const {
    return z * std[0](cell) + mean[0](cell);
  }
};

// Flattens (window, cell) pairs into GEMM-ready batches. Sample id
// w * M + m selects window starts[w] and cell column m. Channel matrices
// come out L x B (one column per sample), targets T x B.
class WindowBatcher {
 public:
  WindowBatcher(const Dataset& ds, std::vector<int> starts, int lookback,
                int horizon);

  std::size_t size() const { return starts_.size() * cells_; }
  int window_start(std::size_t id) const {
    return starts_[id / cells_];
  }
  Eigen::Index cell(std::size_t id) const {
    return static_cast<Eigen::Index>(id % cells_);
  }

  void gather(const std::vector<std::size_t>& ids, std::size_t first,
              std::size_t count, std::vector<Eigen::MatrixXd>& x,
              Eigen::MatrixXd& y) const;

 private:
  const Dataset* ds_;
  std::vector<int> starts_;
  std::size_t cells_;
  int lookback_;
  int horizon_;
};

}  // namespace hexflow
