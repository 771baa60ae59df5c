#include "hexflow/spn.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

#include "hexflow/error.hpp"

namespace hexflow {

namespace {

std::unordered_map<CellId, Eigen::Index> column_index(
    const std::vector<CellId>& cells) {
  std::unordered_map<CellId, Eigen::Index> index;
  index.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i)
    index.emplace(cells[i], static_cast<Eigen::Index>(i));
  return index;
}

// Column indices of each cell's hex neighbours that exist in the frame.
std::vector<std::vector<Eigen::Index>> neighbor_columns(
    const std::vector<CellId>& cells) {
  const auto col = column_index(cells);
  std::vector<std::vector<Eigen::Index>> result(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (const CellId& n : neighbors(cells[i])) {
      auto it = col.find(n);
      if (it != col.end()) result[i].push_back(it->second);
    }
  }
  return result;
}

double median_or_own(const double* vals, int count, double own) {
  if (count == 0) return own;
  std::array<double, 6> buf;
  std::copy(vals, vals + count, buf.begin());
  std::sort(buf.begin(), buf.begin() + count);
  if (count % 2 == 1) return buf[count / 2];
  return (buf[count / 2 - 1] + buf[count / 2]) / 2.0;
}

}  // namespace

double neighbor_median(const Eigen::RowVectorXd& row,
                       const std::vector<CellId>& cells, const CellId& cell) {
  if (static_cast<std::size_t>(row.size()) != cells.size())
    throw std::invalid_argument("row length does not match cell list");
  const auto col = column_index(cells);
  auto it = col.find(cell);
  if (it == col.end())
    throw std::out_of_range("cell " + cell.str() + " is not in the frame");

  std::array<double, 6> vals;
  int count = 0;
  for (const CellId& n : neighbors(cell)) {
    auto nit = col.find(n);
    if (nit == col.end()) continue;
    const double v = row(nit->second);
    if (v != 0.0) vals[count++] = v;
  }
  return median_or_own(vals.data(), count, row(it->second));
}

Eigen::MatrixXd neighbor_median_all(const FlowSeries& series) {
  const auto ncols = neighbor_columns(series.cells);
  Eigen::MatrixXd med(series.values.rows(), series.values.cols());
  for (Eigen::Index t = 0; t < series.values.rows(); ++t) {
    for (Eigen::Index c = 0; c < series.values.cols(); ++c) {
      std::array<double, 6> vals;
      int count = 0;
      for (Eigen::Index nc : ncols[c]) {
        const double v = series.values(t, nc);
        if (v != 0.0) vals[count++] = v;
      }
      med(t, c) = median_or_own(vals.data(), count, series.values(t, c));
    }
  }
  return med;
}

FeatureTensor fuse(const FlowSeries& series) {
  FeatureTensor tensor;
  tensor.raw = series.values;
  tensor.med = neighbor_median_all(series);
  tensor.mean = ((tensor.raw.array() + tensor.med.array()) / 2.0).matrix();
  tensor.cells = series.cells;
  tensor.start_hour = series.start_hour;
  return tensor;
}

Eigen::MatrixXd smooth_target(const Eigen::MatrixXd& raw,
                              const Eigen::MatrixXd& med, double alpha) {
  if (raw.rows() != med.rows() || raw.cols() != med.cols())
    throw std::invalid_argument("raw and median shapes do not match");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("alpha must lie in [0, 1]");
  return alpha * raw + (1.0 - alpha) * med;
}

double grid_search_alpha(const std::function<double(double)>& score) {
  double best_alpha = 1.0;
  double best_score = score(1.0);
  for (int k = 1; k <= 10; ++k) {
    const double alpha = static_cast<double>(10 - k) / 10.0;
    const double s = score(alpha);
    if (s < best_score) {  // strict: ties keep the larger alpha
      best_score = s;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

namespace {

FlowSeries as_series(const Eigen::MatrixXd& values,
                     const FeatureTensor& tensor) {
  FlowSeries s;
  s.values = values;
  s.cells = tensor.cells;
  s.start_hour = tensor.start_hour;
  return s;
}

void write_channel(const std::string& path, const Eigen::MatrixXd& values,
                   const FeatureTensor& tensor) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open " + path + " for writing");
  write_flow_csv(out, as_series(values, tensor));
}

Eigen::MatrixXd read_channel(const std::string& path, FeatureTensor& tensor,
                             bool first) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  FlowSeries s = read_flow_csv(in);
  if (first) {
    tensor.cells = s.cells;
    tensor.start_hour = s.start_hour;
  } else if (s.cells != tensor.cells || s.start_hour != tensor.start_hour) {
    throw DataError("feature channels disagree on frame: " + path);
  }
  return s.values;
}

}  // namespace

void write_feature_csvs(const std::string& path_prefix,
                        const FeatureTensor& tensor) {
  write_channel(path_prefix + "_raw.csv", tensor.raw, tensor);
  write_channel(path_prefix + "_med.csv", tensor.med, tensor);
  write_channel(path_prefix + "_mean.csv", tensor.mean, tensor);

  nlohmann::json meta;
  meta["alpha"] = tensor.alpha;
  meta["channel_order"] = {"raw", "med", "mean"};
  const std::string meta_path = path_prefix + "_meta.json";
  std::ofstream out(meta_path);
  if (!out) throw InputError("cannot open " + meta_path + " for writing");
  out << meta.dump(2) << '\n';
}

FeatureTensor read_feature_csvs(const std::string& path_prefix) {
  FeatureTensor tensor;
  tensor.raw = read_channel(path_prefix + "_raw.csv", tensor, true);
  tensor.med = read_channel(path_prefix + "_med.csv", tensor, false);
  tensor.mean = read_channel(path_prefix + "_mean.csv", tensor, false);

  const std::string meta_path = path_prefix + "_meta.json";
  std::ifstream in(meta_path);
  if (!in) throw InputError("cannot open " + meta_path);
  nlohmann::json meta = nlohmann::json::parse(in);
  tensor.alpha = meta.at("alpha").get<double>();
  return tensor;
}

}  // namespace hexflow
