#include "hexflow/forecast/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hexflow/error.hpp"

namespace hexflow {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kNLinear:
      return "nlinear";
    case ModelKind::kMlp:
      return "mlp";
    case ModelKind::kPatchMini:
      return "patchmini";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "nlinear") return ModelKind::kNLinear;
  if (name == "mlp") return ModelKind::kMlp;
  if (name == "patchmini") return ModelKind::kPatchMini;
  return std::nullopt;
}

void ModelConfig::validate() const {
  if (lookback < 1 || horizon < 1)
    throw ConfigError("lookback and horizon must be at least 1");
  if (channels != 1 && channels != 3)
    throw ConfigError("channel count must be 1 or 3");
  if (hidden < 1) throw ConfigError("hidden width must be at least 1");
  if (kind == ModelKind::kPatchMini) {
    if (patch_len < 1) throw ConfigError("patch length must be at least 1");
    if (lookback % patch_len != 0)
      throw ConfigError("lookback " + std::to_string(lookback) +
                        " is not divisible by patch length " +
                        std::to_string(patch_len));
  }
}

Backbone::Block Backbone::reserve(Eigen::Index rows, Eigen::Index cols,
                                  Eigen::Index fan_in) {
  Block b;
  b.offset = total_;
  b.rows = rows;
  b.cols = cols;
  b.init_bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  total_ += rows * cols;
  blocks_.push_back(b);
  return b;
}

void Backbone::finish_layout() { params_ = Eigen::VectorXd::Zero(total_); }

void Backbone::init(Rng& rng) {
  for (const Block& b : blocks_) {
    double* p = params_.data() + b.offset;
    const Eigen::Index n = b.rows * b.cols;
    for (Eigen::Index i = 0; i < n; ++i)
      p[i] = rng.uniform(-b.init_bound, b.init_bound);
  }
}

namespace {

void check_input(const std::vector<Eigen::MatrixXd>& x,
                 const ModelConfig& cfg) {
  if (static_cast<int>(x.size()) != cfg.channels)
    throw std::invalid_argument("expected " + std::to_string(cfg.channels) +
                                " input channels, got " +
                                std::to_string(x.size()));
  for (const auto& ch : x) {
    if (ch.rows() != cfg.lookback || ch.cols() != x[0].cols())
      throw std::invalid_argument("input channel shape mismatch");
  }
}

Eigen::MatrixXd relu_backward(const Eigen::MatrixXd& pre,
                              const Eigen::MatrixXd& dpost) {
  // Subgradient 0 at the kink.
  return ((pre.array() > 0.0).cast<double>() * dpost.array()).matrix();
}

}  // namespace

NLinearModel::NLinearModel(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  w_ = reserve(cfg_.horizon, cfg_.lookback, cfg_.lookback);
  b_ = reserve(cfg_.horizon, 1, cfg_.lookback);
  if (cfg_.channels > 1) proj_ = reserve(cfg_.channels, 1, cfg_.channels);
  finish_layout();
}

Eigen::MatrixXd NLinearModel::forward(const std::vector<Eigen::MatrixXd>& x) {
  check_input(x, cfg_);
  const Eigen::Index last_row = cfg_.lookback - 1;

  if (cfg_.channels == 1) {
    combined_ = x[0];
  } else {
    const auto p = view(params_, proj_);
    combined_ = p(0, 0) * x[0];
    for (int c = 1; c < cfg_.channels; ++c) combined_ += p(c, 0) * x[c];
  }
  const Eigen::RowVectorXd last = combined_.row(last_row);
  detrended_ = combined_;
  detrended_.rowwise() -= last;

  Eigen::MatrixXd y = view(params_, w_) * detrended_;
  y.colwise() += view(params_, b_).col(0);
  y.rowwise() += last;
  return y;
}

Eigen::VectorXd NLinearModel::backward(const std::vector<Eigen::MatrixXd>& x,
                                       const Eigen::MatrixXd& dy) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
  view(grad, w_) = dy * detrended_.transpose();
  view(grad, b_).col(0) = dy.rowwise().sum();

  Eigen::MatrixXd dx = view(params_, w_).transpose() * dy;
  const Eigen::RowVectorXd dlast =
      dy.colwise().sum() - dx.colwise().sum();
  dx.row(cfg_.lookback - 1) += dlast;

  if (cfg_.channels > 1) {
    auto dp = view(grad, proj_);
    for (int c = 0; c < cfg_.channels; ++c)
      dp(c, 0) = (x[c].array() * dx.array()).sum();
  }
  return grad;
}

MlpModel::MlpModel(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const Eigen::Index in = static_cast<Eigen::Index>(cfg_.lookback) *
                          cfg_.channels;
  w1_ = reserve(cfg_.hidden, in, in);
  b1_ = reserve(cfg_.hidden, 1, in);
  w2_ = reserve(cfg_.horizon, cfg_.hidden, cfg_.hidden);
  b2_ = reserve(cfg_.horizon, 1, cfg_.hidden);
  finish_layout();
}

Eigen::MatrixXd MlpModel::forward(const std::vector<Eigen::MatrixXd>& x) {
  check_input(x, cfg_);
  const Eigen::Index b = x[0].cols();
  z_.resize(static_cast<Eigen::Index>(cfg_.lookback) * cfg_.channels, b);
  for (int c = 0; c < cfg_.channels; ++c)
    z_.middleRows(static_cast<Eigen::Index>(c) * cfg_.lookback,
                  cfg_.lookback) = x[c];

  a1_ = view(params_, w1_) * z_;
  a1_.colwise() += view(params_, b1_).col(0);
  h1_ = a1_.cwiseMax(0.0);

  Eigen::MatrixXd y = view(params_, w2_) * h1_;
  y.colwise() += view(params_, b2_).col(0);
  return y;
}

Eigen::VectorXd MlpModel::backward(const std::vector<Eigen::MatrixXd>& x,
                                   const Eigen::MatrixXd& dy) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
  view(grad, w2_) = dy * h1_.transpose();
  view(grad, b2_).col(0) = dy.rowwise().sum();

  const Eigen::MatrixXd dh1 = view(params_, w2_).transpose() * dy;
  const Eigen::MatrixXd da1 = relu_backward(a1_, dh1);
  view(grad, w1_) = da1 * z_.transpose();
  view(grad, b1_).col(0) = da1.rowwise().sum();
  return grad;
}

PatchMiniModel::PatchMiniModel(const ModelConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  tokens_ = cfg_.lookback / cfg_.patch_len;
  patch_dim_ = cfg_.patch_len * cfg_.channels;
  const Eigen::Index d = cfg_.hidden;
  const Eigen::Index flat = d * tokens_;

  we_ = reserve(d, patch_dim_, patch_dim_);
  be_ = reserve(d, 1, patch_dim_);
  pos_ = reserve(d, tokens_, d);
  wq_ = reserve(d, d, d);
  wk_ = reserve(d, d, d);
  wv_ = reserve(d, d, d);
  wo_ = reserve(d, d, d);
  f1_ = reserve(d, d, d);
  g1_ = reserve(d, 1, d);
  f2_ = reserve(d, d, d);
  g2_ = reserve(d, 1, d);
  wh_ = reserve(cfg_.horizon, flat, flat);
  bh_ = reserve(cfg_.horizon, 1, flat);
  finish_layout();
}

Eigen::MatrixXd PatchMiniModel::forward(
    const std::vector<Eigen::MatrixXd>& x) {
  check_input(x, cfg_);
  const Eigen::Index b = x[0].cols();
  const Eigen::Index d = cfg_.hidden;
  const Eigen::Index nt = tokens_;
  const Eigen::Index p = cfg_.patch_len;

  patches_.resize(patch_dim_, nt * b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index t = 0; t < nt; ++t)
      for (int c = 0; c < cfg_.channels; ++c)
        patches_.block(static_cast<Eigen::Index>(c) * p, j * nt + t, p, 1) =
            x[c].block(t * p, j, p, 1);

  embedded_ = view(params_, we_) * patches_;
  embedded_.colwise() += view(params_, be_).col(0);
  const auto pos = view(params_, pos_);
  for (Eigen::Index j = 0; j < b; ++j)
    embedded_.middleCols(j * nt, nt) += pos;

  q_ = view(params_, wq_) * embedded_;
  k_ = view(params_, wk_) * embedded_;
  v_ = view(params_, wv_) * embedded_;

  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  attn_.resize(nt, nt * b);
  attn_out_.resize(d, nt * b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const auto qj = q_.middleCols(j * nt, nt);
    const auto kj = k_.middleCols(j * nt, nt);
    const auto vj = v_.middleCols(j * nt, nt);
    Eigen::MatrixXd scores = (qj.transpose() * kj) * scale;
    for (Eigen::Index i = 0; i < nt; ++i) {
      const double m = scores.row(i).maxCoeff();
      Eigen::RowVectorXd e = (scores.row(i).array() - m).exp().matrix();
      scores.row(i) = e / e.sum();
    }
    attn_.middleCols(j * nt, nt) = scores;
    attn_out_.middleCols(j * nt, nt) = vj * scores.transpose();
  }

  r1_ = embedded_ + view(params_, wo_) * attn_out_;
  a1_ = view(params_, f1_) * r1_;
  a1_.colwise() += view(params_, g1_).col(0);
  h1_ = a1_.cwiseMax(0.0);
  r2_ = view(params_, f2_) * h1_;
  r2_.colwise() += view(params_, g2_).col(0);
  r2_ += r1_;

  const Eigen::Map<const Eigen::MatrixXd> flat(r2_.data(), d * nt, b);
  Eigen::MatrixXd y = view(params_, wh_) * flat;
  y.colwise() += view(params_, bh_).col(0);
  return y;
}

Eigen::VectorXd PatchMiniModel::backward(const std::vector<Eigen::MatrixXd>&,
                                         const Eigen::MatrixXd& dy) {
  const Eigen::Index b = dy.cols();
  const Eigen::Index d = cfg_.hidden;
  const Eigen::Index nt = tokens_;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());

  const Eigen::Map<const Eigen::MatrixXd> flat(r2_.data(), d * nt, b);
  view(grad, wh_) = dy * flat.transpose();
  view(grad, bh_).col(0) = dy.rowwise().sum();
  Eigen::MatrixXd dflat = view(params_, wh_).transpose() * dy;
  const Eigen::Map<const Eigen::MatrixXd> dr2(dflat.data(), d, nt * b);

  // Feed-forward sublayer.
  view(grad, f2_) = dr2 * h1_.transpose();
  view(grad, g2_).col(0) = dr2.rowwise().sum();
  const Eigen::MatrixXd dh1 = view(params_, f2_).transpose() * dr2;
  const Eigen::MatrixXd da1 = relu_backward(a1_, dh1);
  view(grad, f1_) = da1 * r1_.transpose();
  view(grad, g1_).col(0) = da1.rowwise().sum();
  Eigen::MatrixXd dr1 = dr2;
  dr1 += view(params_, f1_).transpose() * da1;

  // Attention sublayer.
  view(grad, wo_) = dr1 * attn_out_.transpose();
  const Eigen::MatrixXd dao = view(params_, wo_).transpose() * dr1;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Eigen::MatrixXd dq(d, nt * b), dk(d, nt * b), dv(d, nt * b);
  for (Eigen::Index j = 0; j < b; ++j) {
    const auto aj = attn_.middleCols(j * nt, nt);
    const auto daoj = dao.middleCols(j * nt, nt);
    const auto qj = q_.middleCols(j * nt, nt);
    const auto kj = k_.middleCols(j * nt, nt);
    const auto vj = v_.middleCols(j * nt, nt);

    dv.middleCols(j * nt, nt) = daoj * aj;
    const Eigen::MatrixXd da = daoj.transpose() * vj;
    Eigen::MatrixXd ds(nt, nt);
    for (Eigen::Index i = 0; i < nt; ++i) {
      const double dot = da.row(i).dot(aj.row(i));
      ds.row(i) = ((da.row(i).array() - dot) * aj.row(i).array()).matrix();
    }
    ds *= scale;
    dq.middleCols(j * nt, nt) = kj * ds.transpose();
    dk.middleCols(j * nt, nt) = qj * ds;
  }
  view(grad, wq_) = dq * embedded_.transpose();
  view(grad, wk_) = dk * embedded_.transpose();
  view(grad, wv_) = dv * embedded_.transpose();

  Eigen::MatrixXd de = view(params_, wq_).transpose() * dq;
  de += view(params_, wk_).transpose() * dk;
  de += view(params_, wv_).transpose() * dv;
  de += dr1;  // residual connection around the attention block

  auto dpos = view(grad, pos_);
  for (Eigen::Index j = 0; j < b; ++j) dpos += de.middleCols(j * nt, nt);
  view(grad, we_) = de * patches_.transpose();
  view(grad, be_).col(0) = de.rowwise().sum();
  return grad;
}

std::unique_ptr<Backbone> make_backbone(const ModelConfig& cfg) {
  switch (cfg.kind) {
    case ModelKind::kNLinear:
      return std::make_unique<NLinearModel>(cfg);
    case ModelKind::kMlp:
      return std::make_unique<MlpModel>(cfg);
    case ModelKind::kPatchMini:
      return std::make_unique<PatchMiniModel>(cfg);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace hexflow
