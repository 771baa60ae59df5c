#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <limits>
#include <vector>

#include "hexflow/forecast/models.hpp"
#include "hexflow/forecast/windows.hpp"

namespace hexflow {

struct TrainConfig {
  double lr = 5e-4;
  int batch = 128;
  int max_epochs = 500;
  int patience = 50;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;  // throws ConfigError
};

// Per-parameter first/second moments and the step counter.
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  explicit AdamState(Eigen::Index n)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

// One bias-corrected Adam update in place.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
               AdamState& state, const TrainConfig& cfg);

struct TrainResult {
  std::vector<double> train_history;  // running-mean batch MSE per epoch
  std::vector<double> val_history;    // full validation MSE per epoch
  int best_epoch = 0;                 // 1-based epoch of the lowest val MSE
  double best_val_mse = std::numeric_limits<double>::infinity();
  int epochs_run = 0;
};

// Mean squared error over every sample, horizon step, and cell.
// Throws ConfigError on an empty sample set.
double evaluate(Backbone& model, const WindowBatcher& data,
                int batch_size = 1024);

// Seeded init + shuffled mini-batch epochs with early stopping: training
// halts once validation MSE fails to improve for `patience` consecutive
// epochs, and the best-epoch parameters are restored. Throws DataError with
// diagnostics if the loss or a gradient turns non-finite.
TrainResult train(Backbone& model, const WindowBatcher& train_data,
                  const WindowBatcher& val_data, const TrainConfig& cfg,
                  std::uint64_t seed);

}  // namespace hexflow
