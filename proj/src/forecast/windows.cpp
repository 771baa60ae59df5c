#include "hexflow/forecast/windows.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hexflow/error.hpp"

namespace hexflow {

void WindowSpec::validate() const {
  if (lookback < 1 || horizon < 1)
    throw ConfigError("lookback and horizon must be at least 1");
  if (train_frac <= 0.0 || val_frac <= 0.0 || test_frac <= 0.0)
    throw ConfigError("split fractions must be positive");
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    throw ConfigError("split fractions must sum to 1");
}

std::pair<int, int> split_boundaries(std::int64_t n_hours,
                                     const WindowSpec& spec) {
  const int b1 = static_cast<int>(
      std::floor(spec.train_frac * static_cast<double>(n_hours)));
  const int b2 = static_cast<int>(std::floor(
      (spec.train_frac + spec.val_frac) * static_cast<double>(n_hours)));
  return {b1, b2};
}

WindowSet make_windows(std::int64_t n_hours, const WindowSpec& spec) {
  spec.validate();
  const std::int64_t need = spec.lookback + spec.horizon;
  if (n_hours < need)
    throw DataError("series of " + std::to_string(n_hours) +
                    " hours is shorter than lookback+horizon = " +
                    std::to_string(need));

  const auto [b1, b2] = split_boundaries(n_hours, spec);
  WindowSet set;
  for (int s = spec.lookback; s <= n_hours - spec.horizon; ++s) {
    if (s < b1)
      set.train.push_back(s);
    else if (s < b2)
      set.val.push_back(s);
    else
      set.test.push_back(s);
  }
  return set;
}

void Dataset::validate() const {
  if (channels.empty()) throw std::invalid_argument("dataset has no channels");
  for (const auto& ch : channels) {
    if (ch.rows() != target.rows() || ch.cols() != target.cols())
      throw std::invalid_argument("channel and target shapes do not match");
  }
  if (static_cast<std::size_t>(target.cols()) != cells.size())
    throw std::invalid_argument("cell list does not match column count");
}

Standardizer Standardizer::fit(const Dataset& ds, Eigen::Index train_rows) {
  ds.validate();
  if (train_rows < 1 || train_rows > ds.target.rows())
    throw std::invalid_argument("train_rows out of range");

  Standardizer st;
  for (const auto& ch : ds.channels) {
    const auto block = ch.topRows(train_rows);
    Eigen::RowVectorXd mu = block.colwise().mean();
    Eigen::RowVectorXd var =
        (block.rowwise() - mu).array().square().colwise().mean().matrix();
    Eigen::RowVectorXd sd = var.array().sqrt().max(1e-8).matrix();
    st.mean.push_back(std::move(mu));
    st.std.push_back(std::move(sd));
  }
  return st;
}

Dataset Standardizer::apply(const Dataset& ds) const {
  if (ds.channels.size() != mean.size())
    throw std::invalid_argument("standardizer channel count mismatch");
  Dataset out = ds;
  for (std::size_t c = 0; c < ds.channels.size(); ++c) {
    out.channels[c] = ((ds.channels[c].rowwise() - mean[c]).array().rowwise() /
                       std[c].array())
                          .matrix();
  }
  out.target = ((ds.target.rowwise() - mean[0]).array().rowwise() /
                std[0].array())
                   .matrix();
  return out;
}

WindowBatcher::WindowBatcher(const Dataset& ds, std::vector<int> starts,
                             int lookback, int horizon)
    : ds_(&ds),
      starts_(std::move(starts)),
      cells_(static_cast<std::size_t>(ds.cell_count())),
      lookback_(lookback),
      horizon_(horizon) {
  ds.validate();
  for (int s : starts_) {
    if (s < lookback_ || s + horizon_ > ds.hours())
      throw std::invalid_argument("window start " + std::to_string(s) +
                                  " does not fit the series");
  }
}

void WindowBatcher::gather(const std::vector<std::size_t>& ids,
                           std::size_t first, std::size_t count,
                           std::vector<Eigen::MatrixXd>& x,
                           Eigen::MatrixXd& y) const {
  const std::size_t n_ch = ds_->channels.size();
  x.resize(n_ch);
  for (auto& m : x) m.resize(lookback_, count);
  y.resize(horizon_, count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t id = ids[first + j];
    const int s = starts_[id / cells_];
    const Eigen::Index m = static_cast<Eigen::Index>(id % cells_);
    for (std::size_t c = 0; c < n_ch; ++c)
      x[c].col(j) = ds_->channels[c].block(s - lookback_, m, lookback_, 1);
    y.col(j) = ds_->target.block(s, m, horizon_, 1);
  }
}

}  // namespace hexflow
