#include "hexflow/forecast/train.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "hexflow/error.hpp"

namespace hexflow {

void TrainConfig::validate() const {
  if (lr <= 0.0) throw ConfigError("learning rate must be positive");
  if (batch < 1) throw ConfigError("batch size must be at least 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ConfigError("adam betas must lie in [0, 1)");
  if (eps <= 0.0) throw ConfigError("adam eps must be positive");
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grad,
               AdamState& state, const TrainConfig& cfg) {
  ++state.step;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v =
      (cfg.beta2 * state.v.array() + (1.0 - cfg.beta2) * grad.array().square())
          .matrix();
  const double m_corr =
      1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double v_corr =
      1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  params.array() -= cfg.lr * (state.m.array() / m_corr) /
                    ((state.v.array() / v_corr).sqrt() + cfg.eps);
}

double evaluate(Backbone& model, const WindowBatcher& data, int batch_size) {
  if (data.size() == 0) throw ConfigError("cannot evaluate an empty split");
  std::vector<std::size_t> ids(data.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});

  std::vector<Eigen::MatrixXd> x;
  Eigen::MatrixXd y;
  double sq_sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ids.size();
       i += static_cast<std::size_t>(batch_size)) {
    const std::size_t count =
        std::min<std::size_t>(batch_size, ids.size() - i);
    data.gather(ids, i, count, x, y);
    const Eigen::MatrixXd diff = model.forward(x) - y;
    sq_sum += diff.squaredNorm();
    n += static_cast<std::size_t>(diff.size());
  }
  return sq_sum / static_cast<double>(n);
}

TrainResult train(Backbone& model, const WindowBatcher& train_data,
                  const WindowBatcher& val_data, const TrainConfig& cfg,
                  std::uint64_t seed) {
  cfg.validate();
  if (train_data.size() == 0 || val_data.size() == 0)
    throw ConfigError("training requires nonempty train and val splits");

  Rng init_rng(derive_seed(seed, 0xA11));
  model.init(init_rng);
  Rng shuffle_rng(derive_seed(seed, 0xB22));
  AdamState state(model.params().size());

  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  Eigen::VectorXd best_params = model.params();
  int epochs_since_best = 0;

  std::vector<Eigen::MatrixXd> x;
  Eigen::MatrixXd y;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double sq_sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < order.size();
         i += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t count =
          std::min<std::size_t>(cfg.batch, order.size() - i);
      train_data.gather(order, i, count, x, y);
      Eigen::MatrixXd diff = model.forward(x) - y;
      const double batch_sq = diff.squaredNorm();
      if (!std::isfinite(batch_sq))
        throw DataError("training diverged: non-finite loss at epoch " +
                        std::to_string(epoch) + ", batch " +
                        std::to_string(i / cfg.batch));
      sq_sum += batch_sq;
      n += static_cast<std::size_t>(diff.size());

      diff *= 2.0 / static_cast<double>(diff.size());
      const Eigen::VectorXd grad = model.backward(x, diff);
      if (!grad.allFinite())
        throw DataError("training diverged: non-finite gradient at epoch " +
                        std::to_string(epoch) + ", batch " +
                        std::to_string(i / cfg.batch) +
                        ", param norm " + std::to_string(model.params().norm()));
      adam_step(model.params(), grad, state, cfg);
    }
    result.train_history.push_back(sq_sum / static_cast<double>(n));
    const double val = evaluate(model, val_data);
    result.val_history.push_back(val);
    result.epochs_run = epoch;

    if (val < result.best_val_mse) {
      result.best_val_mse = val;
      result.best_epoch = epoch;
      best_params = model.params();
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= cfg.patience) break;
    }
  }
  model.params() = best_params;
  return result;
}

}  // namespace hexflow
