#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "hexflow/rng.hpp"

namespace hexflow {

enum class ModelKind { kNLinear, kMlp, kPatchMini };

const char* to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct ModelConfig {
  ModelKind kind = ModelKind::kNLinear;
  int lookback = 96;
  int horizon = 48;
  int channels = 1;  // 1 without the SPN channels, 3 with them
  int hidden = 128;  // MLP hidden width; PatchMini embedding width
  int patch_len = 4;

  void validate() const;  // throws ConfigError
};

// A forecasting backbone over per-cell univariate windows, batched for GEMM
// throughput: forward takes one L x B matrix per channel (column = sample)
// and returns T x B predictions. backward must be called directly after the
// forward pass it differentiates; it consumes dLoss/dY and returns the flat
// gradient in the same layout as params(). Parameters are shared across
// cells.
class Backbone {
 public:
  virtual ~Backbone() = default;

  Eigen::VectorXd& params() { return params_; }
  const Eigen::VectorXd& params() const { return params_; }

  // Seeded uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) per parameter block.
  void init(Rng& rng);

  virtual const ModelConfig& config() const = 0;
  virtual Eigen::MatrixXd forward(const std::vector<Eigen::MatrixXd>& x) = 0;
  virtual Eigen::VectorXd backward(const std::vector<Eigen::MatrixXd>& x,
                                   const Eigen::MatrixXd& dy) = 0;

 protected:
  struct Block {
    Eigen::Index offset = 0;
    Eigen::Index rows = 0;
    Eigen::Index cols = 0;
    double init_bound = 0.0;  // 1/sqrt(fan_in)
  };

  // Reserves a rows x cols block; call from constructors in layout order,
  // then finish_layout().
  Block reserve(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in);
  void finish_layout();

  static Eigen::Map<Eigen::MatrixXd> view(Eigen::VectorXd& v, const Block& b) {
    return {v.data() + b.offset, b.rows, b.cols};
  }
  static Eigen::Map<const Eigen::MatrixXd> view(const Eigen::VectorXd& v,
                                                const Block& b) {
    return {v.data() + b.offset, b.rows, b.cols};
  }

  Eigen::VectorXd params_;

 private:
  std::vector<Block> blocks_;
  Eigen::Index total_ = 0;
};

// y = W (x - x_L 1) + b + x_L 1 on the channel-combined window x; the
// last-value subtraction makes zero weights an exact persistence forecast.
// For C=1 the channel combination is the fixed identity; for C>1 it is a
// learned C-vector.
class NLinearModel : public Backbone {
 public:
  explicit NLinearModel(const ModelConfig& cfg);

  const ModelConfig& config() const override { return cfg_; }
  Eigen::MatrixXd forward(const std::vector<Eigen::MatrixXd>& x) override;
  Eigen::VectorXd backward(const std::vector<Eigen::MatrixXd>& x,
                           const Eigen::MatrixXd& dy) override;

  Eigen::Map<Eigen::MatrixXd> weight() { return view(params_, w_); }
  Eigen::Map<Eigen::MatrixXd> bias() { return view(params_, b_); }
  // Only present for C > 1.
  Eigen::Map<Eigen::MatrixXd> input_proj() { return view(params_, proj_); }

 private:
  ModelConfig cfg_;
  Block w_, b_, proj_;
  Eigen::MatrixXd combined_;  // cached x after channel combination
  Eigen::MatrixXd detrended_; // cached x - x_L 1
};

// Two affine layers with max(0, x) between, on the flattened L*C history.
class MlpModel : public Backbone {
 public:
  explicit MlpModel(const ModelConfig& cfg);

  const ModelConfig& config() const override { return cfg_; }
  Eigen::MatrixXd forward(const std::vector<Eigen::MatrixXd>& x) override;
  Eigen::VectorXd backward(const std::vector<Eigen::MatrixXd>& x,
                           const Eigen::MatrixXd& dy) override;

  Eigen::Map<Eigen::MatrixXd> w1() { return view(params_, w1_); }
  Eigen::Map<Eigen::MatrixXd> b1() { return view(params_, b1_); }
  Eigen::Map<Eigen::MatrixXd> w2() { return view(params_, w2_); }
  Eigen::Map<Eigen::MatrixXd> b2() { return view(params_, b2_); }

 private:
  ModelConfig cfg_;
  Block w1_, b1_, w2_, b2_;
  Eigen::MatrixXd z_;   // flattened input
  Eigen::MatrixXd a1_;  // pre-activation
  Eigen::MatrixXd h1_;  // post-ReLU
};

// Patch embedding + learned positional embeddings + one single-head
// self-attention block and a position-wise feed-forward, both with residual
// connections, then an affine head from the flattened tokens.
class PatchMiniModel : public Backbone {
 public:
  explicit PatchMiniModel(const ModelConfig& cfg);

  const ModelConfig& config() const override { return cfg_; }
  Eigen::MatrixXd forward(const std::vector<Eigen::MatrixXd>& x) override;
  Eigen::VectorXd backward(const std::vector<Eigen::MatrixXd>& x,
                           const Eigen::MatrixXd& dy) override;

  int tokens() const { return tokens_; }
  // Row-stochastic attention weights of the last forward pass, one
  // tokens x tokens block per sample, laid side by side.
  const Eigen::MatrixXd& attention() const { return attn_; }

 private:
  ModelConfig cfg_;
  int tokens_ = 0;
  int patch_dim_ = 0;
  Block we_, be_, pos_, wq_, wk_, wv_, wo_, f1_, g1_, f2_, g2_, wh_, bh_;

  Eigen::MatrixXd patches_;   // patch_dim x (tokens*B)
  Eigen::MatrixXd embedded_;  // tokens + positions, d x (tokens*B)
  Eigen::MatrixXd q_, k_, v_;
  Eigen::MatrixXd attn_;      // tokens x (tokens*B)
  Eigen::MatrixXd attn_out_;  // d x (tokens*B)
  Eigen::MatrixXd r1_;        // post-attention residual
  Eigen::MatrixXd a1_;        // feed-forward pre-activation
  Eigen::MatrixXd h1_;        // feed-forward post-ReLU
  Eigen::MatrixXd r2_;        // final token representation
};

std::unique_ptr<Backbone> make_backbone(const ModelConfig& cfg);

}  // namespace hexflow
