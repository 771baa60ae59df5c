#include "doctest.h"

#include <cmath>
#include <vector>

#include "hexflow/error.hpp"
#include "hexflow/forecast/models.hpp"
#include "hexflow/rng.hpp"
#include "gradcheck.hpp"

using namespace hexflow;

namespace {

std::vector<Eigen::MatrixXd> random_batch(int lookback, int channels,
                                          int batch, Rng& rng) {
  std::vector<Eigen::MatrixXd> x;
  for (int ch = 0; ch < channels; ++ch) {
    Eigen::MatrixXd m(lookback, batch);
    for (int i = 0; i < lookback; ++i)
      for (int j = 0; j < batch; ++j) m(i, j) = rng.normal();
    x.push_back(std::move(m));
  }
  return x;
}

Eigen::MatrixXd random_target(int horizon, int batch, Rng& rng) {
  Eigen::MatrixXd y(horizon, batch);
  for (int i = 0; i < horizon; ++i)
    for (int j = 0; j < batch; ++j) y(i, j) = rng.normal();
  return y;
}

ModelConfig toy_config(ModelKind kind, int channels) {
  ModelConfig cfg;
  cfg.kind = kind;
  cfg.lookback = 8;
  cfg.horizon = 4;
  cfg.channels = channels;
  cfg.hidden = 8;
  cfg.patch_len = 4;
  return cfg;
}

}  // namespace

TEST_CASE("model names round-trip") {
  CHECK(parse_model_kind("nlinear") == ModelKind::kNLinear);
  CHECK(parse_model_kind("mlp") == ModelKind::kMlp);
  CHECK(parse_model_kind("patchmini") == ModelKind::kPatchMini);
  CHECK_FALSE(parse_model_kind("transformer").has_value());
  CHECK(std::string(to_string(ModelKind::kPatchMini)) == "patchmini");
}

TEST_CASE("model config validation") {
  ModelConfig cfg = toy_config(ModelKind::kPatchMini, 1);
  CHECK_NOTHROW(cfg.validate());
  cfg.lookback = 10;  // not divisible by patch_len
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = toy_config(ModelKind::kNLinear, 2);  // channels must be 1 or 3
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = toy_config(ModelKind::kMlp, 1);
  cfg.hidden = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("zero-weight nlinear is an exact persistence forecast") {
  const ModelConfig cfg = toy_config(ModelKind::kNLinear, 1);
  NLinearModel model(cfg);
  model.params().setZero();
  Rng rng(81);
  const auto x = random_batch(cfg.lookback, 1, 5, rng);
  const Eigen::MatrixXd y = model.forward(x);
  for (int t = 0; t < cfg.horizon; ++t)
    for (int j = 0; j < 5; ++j)
      CHECK(y(t, j) == x[0](cfg.lookback - 1, j));
}

TEST_CASE("nlinear hand example at L=2, T=2") {
  ModelConfig cfg = toy_config(ModelKind::kNLinear, 1);
  cfg.lookback = 2;
  cfg.horizon = 2;
  NLinearModel model(cfg);
  model.weight().setZero();
  model.weight()(0, 0) = 0.25;   // acts on x_1 - x_L = 1 - 3 = -2
  model.weight()(1, 0) = -0.5;
  model.bias()(0, 0) = 0.1;
  model.bias()(1, 0) = 0.2;

  Eigen::MatrixXd x(2, 1);
  x << 1.0, 3.0;
  const Eigen::MatrixXd y = model.forward({x});
  CHECK(y(0, 0) == doctest::Approx(0.25 * -2.0 + 0.1 + 3.0).epsilon(1e-15));
  CHECK(y(1, 0) == doctest::Approx(-0.5 * -2.0 + 0.2 + 3.0).epsilon(1e-15));
}

TEST_CASE("nlinear is level-shift equivariant for one channel") {
  const ModelConfig cfg = toy_config(ModelKind::kNLinear, 1);
  NLinearModel model(cfg);
  Rng rng(82);
  model.init(rng);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto x = random_batch(cfg.lookback, 1, 3, rng);
    const double shift = rng.uniform(-5.0, 5.0);
    const Eigen::MatrixXd base = model.forward(x);
    std::vector<Eigen::MatrixXd> shifted{x[0].array() + shift};
    const Eigen::MatrixXd moved = model.forward(shifted);
    CHECK(((moved.array() - shift) - base.array()).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("mlp forward matches a hand computation") {
  ModelConfig cfg = toy_config(ModelKind::kMlp, 1);
  cfg.lookback = 2;
  cfg.horizon = 1;
  cfg.hidden = 2;
  MlpModel model(cfg);
  model.w1() << 1.0, 0.0, 0.0, -1.0;
  model.b1() << 0.5, -0.5;
  model.w2() << 1.0, -1.0;
  model.b2() << 0.25;

  Eigen::MatrixXd x(2, 2);
  x.col(0) << 2.0, -3.0;  // a1 = (2.5, 2.5), both pass ReLU
  x.col(1) << -2.0, 3.0;  // a1 = (-1.5, -3.5), both clipped
  const Eigen::MatrixXd y = model.forward({x});
  CHECK(y(0, 0) == doctest::Approx(2.5 - 2.5 + 0.25).epsilon(1e-15));
  CHECK(y(0, 1) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("patchmini splits the lookback into lookback/patch_len tokens") {
  ModelConfig cfg = toy_config(ModelKind::kPatchMini, 1);
  cfg.lookback = 48;
  PatchMiniModel model(cfg);
  CHECK(model.tokens() == 12);
}

TEST_CASE("attention rows are stochastic after a forward pass") {
  ModelConfig cfg = toy_config(ModelKind::kPatchMini, 3);
  PatchMiniModel model(cfg);
  Rng rng(83);
  model.init(rng);
  const int batch = 4;
  const auto x = random_batch(cfg.lookback, 3, batch, rng);
  model.forward(x);
  const Eigen::MatrixXd& attn = model.attention();
  const int tokens = model.tokens();
  REQUIRE(attn.rows() == tokens);
  REQUIRE(attn.cols() == tokens * batch);
  for (int j = 0; j < batch; ++j) {
    const auto block = attn.middleCols(j * tokens, tokens);
    for (int i = 0; i < tokens; ++i) {
      CHECK(block.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(block.row(i).minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("the factory builds the requested backbone") {
  for (const ModelKind kind :
       {ModelKind::kNLinear, ModelKind::kMlp, ModelKind::kPatchMini}) {
    const ModelConfig cfg = toy_config(kind, 1);
    auto model = make_backbone(cfg);
    REQUIRE(model != nullptr);
    CHECK(model->config().kind == kind);
    Rng rng(84);
    model->init(rng);
    const auto x = [&] {
      Rng data_rng(85);
      return random_batch(cfg.lookback, 1, 2, data_rng);
    }();
    const Eigen::MatrixXd y = model->forward(x);
    CHECK(y.rows() == cfg.horizon);
    CHECK(y.cols() == 2);
    CHECK(y.allFinite());
  }
}

TEST_CASE("init is deterministic in the seed") {
  const ModelConfig cfg = toy_config(ModelKind::kPatchMini, 3);
  PatchMiniModel a(cfg), b(cfg);
  Rng ra(86), rb(86);
  a.init(ra);
  b.init(rb);
  CHECK(a.params() == b.params());
  Rng rc(87);
  PatchMiniModel c(cfg);
  c.init(rc);
  CHECK(a.params() != c.params());
}

TEST_CASE("analytic gradients match central differences on every backbone") {
  // Toy shape throughout: 3 cells' worth of samples (batch 6), L=8, T=4.
  for (const int channels : {1, 3}) {
    for (const ModelKind kind :
         {ModelKind::kNLinear, ModelKind::kMlp, ModelKind::kPatchMini}) {
      CAPTURE(static_cast<int>(kind));
      CAPTURE(channels);
      const ModelConfig cfg = toy_config(kind, channels);
      auto model = make_backbone(cfg);
      Rng rng(88);
      model->init(rng);
      Rng data_rng(89);
      const auto x = random_batch(cfg.lookback, channels, 6, data_rng);
      const Eigen::MatrixXd y = random_target(cfg.horizon, 6, data_rng);
      const auto result = oracle::grad_check(*model, x, y);
      CHECK(result.max_rel_err < 1e-4);
    }
  }
}

TEST_CASE("backward leaves parameters untouched") {
  const ModelConfig cfg = toy_config(ModelKind::kMlp, 3);
  auto model = make_backbone(cfg);
  Rng rng(90);
  model->init(rng);
  const Eigen::VectorXd before = model->params();
  const auto x = random_batch(cfg.lookback, 3, 4, rng);
  const Eigen::MatrixXd pred = model->forward(x);
  const Eigen::MatrixXd dy = Eigen::MatrixXd::Ones(cfg.horizon, 4);
  model->backward(x, dy);
  CHECK(model->params() == before);
}
