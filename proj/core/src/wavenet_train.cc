// Copyright 2026 The gvox Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "gvox/error.h"
#include "gvox/rng.h"
#include "gvox/wavenet.h"
#include "wavenet_math.h"

namespace gvox {
namespace {

using Eigen::MatrixXd;
using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;

// Columns shifted right by d (zeros enter on the left).
MatrixXd ShiftRight(const MatrixXd& m, int d) {
  MatrixXd out = MatrixXd::Zero(m.rows(), m.cols());
  if (d < m.cols()) out.rightCols(m.cols() - d) = m.leftCols(m.cols() - d);
  return out;
}

// Adjoint of ShiftRight.
MatrixXd ShiftLeft(const MatrixXd& m, int d) {
  MatrixXd out = MatrixXd::Zero(m.rows(), m.cols());
  if (d < m.cols()) out.leftCols(m.cols() - d) = m.rightCols(m.cols() - d);
  return out;
}

struct LayerCache {
  MatrixXd input, past, tf, sg, out;
};

}  // namespace

double WindowLossAndGradient(const WaveNetLayout& layout,
                             std::span<const double> params,
                             std::span<const MuLawSymbol> symbols,
                             std::span<const double> thetas,
                             std::size_t first_scored,
                             std::vector<double>* gradient) {
  using internal::ConstMatrixMap;
  using internal::ConstVectorMap;
  const auto& config = layout.config();
  const int c = config.residual_channels;
  const int s = config.skip_channels;
  const int dim = config.conditioning_dim;
  const int n = static_cast<int>(symbols.size());
  if (params.size() != layout.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "parameter vector size");
  }
  if (thetas.size() != symbols.size() * static_cast<std::size_t>(dim)) {
    throw Error(ErrorCode::kAlignment, "theta rows do not match window length");
  }
  if (n == 0 || first_scored >= symbols.size()) {
    throw Error(ErrorCode::kInvalidArgument, "window has no scored positions");
  }
  const int first = static_cast<int>(first_scored);
  const int scored = n - first;

  // Normalized conditioning, dim x n.
  const Eigen::Map<const MatrixXd> raw(thetas.data(), dim, n);
  const auto offset = ConstVectorMap(params, layout.cond_offset(), dim);
  const auto scale = ConstVectorMap(params, layout.cond_scale(), dim);
  const MatrixXd cond =
      ((raw.colwise() - offset).array().colwise() * scale.array()).matrix();

  std::vector<int> inputs(n);
  for (int t = 0; t < n; ++t) inputs[t] = t == 0 ? kMuLawZero : symbols[t - 1];

  const auto embedding = ConstMatrixMap(params, layout.embedding(), c, kAlphabetSize);
  MatrixXd h(c, n);
  for (int t = 0; t < n; ++t) h.col(t) = embedding.col(inputs[t]);

  std::vector<LayerCache> caches(config.layers());
  MatrixXd skip = MatrixXd::Zero(s, n);
  for (int l = 0; l < config.layers(); ++l) {
    const auto& L = layout.layer(l);
    auto& k = caches[l];
    k.input = h;
    k.past = ShiftRight(h, config.Dilation(l));
    MatrixXd zf = ConstMatrixMap(params, L.filter_past, c, c) * k.past +
                  ConstMatrixMap(params, L.filter_now, c, c) * h +
                  ConstMatrixMap(params, L.filter_cond, c, dim) * cond;
    zf.colwise() += ConstVectorMap(params, L.filter_bias, c);
    MatrixXd zg = ConstMatrixMap(params, L.gate_past, c, c) * k.past +
                  ConstMatrixMap(params, L.gate_now, c, c) * h +
                  ConstMatrixMap(params, L.gate_cond, c, dim) * cond;
    zg.colwise() += ConstVectorMap(params, L.gate_bias, c);
    k.tf = zf.array().tanh();
    k.sg = (1.0 / (1.0 + (-zg.array()).exp())).matrix();
    k.out = k.tf.cwiseProduct(k.sg);
    skip += ConstMatrixMap(params, L.skip, s, c) * k.out;
    skip.colwise() += ConstVectorMap(params, L.skip_bias, s);
    if (l + 1 < config.layers()) {
      h += ConstMatrixMap(params, L.residual, c, c) * k.out;
      h.colwise() += ConstVectorMap(params, L.residual_bias, c);
    }
  }

  // Head on the scored columns only.
  const MatrixXd a = skip.rightCols(scored).array().tanh();
  MatrixXd y = ConstMatrixMap(params, layout.head_hidden(), s, s) * a;
  y.colwise() += ConstVectorMap(params, layout.head_hidden_bias(), s);
  y = y.array().tanh();
  MatrixXd logits = ConstMatrixMap(params, layout.head_out(), kAlphabetSize, s) * y;
  logits.colwise() += ConstVectorMap(params, layout.head_out_bias(), kAlphabetSize);

  // loss = mean over scored positions of -log2 softmax_y. The coding floor
  // is left out so training keeps pushing unlikely symbols down.
  const double inv = 1.0 / (scored * std::numbers::ln2);
  double loss = 0.0;
  MatrixXd dlogits(kAlphabetSize, scored);
  for (int j = 0; j < scored; ++j) {
    std::array<double, kAlphabetSize> q;
    internal::Softmax(logits.col(j).data(), q.data());
    const int target = symbols[first + j];
    // Log-sum-exp form stays finite when q underflows.
    const double peak = logits.col(j).maxCoeff();
    const double lse = peak + std::log((logits.col(j).array() - peak).exp().sum());
    loss += (lse - logits(target, j)) / std::numbers::ln2;
    for (int k = 0; k < kAlphabetSize; ++k) {
      dlogits(k, j) = (q[k] - (k == target ? 1.0 : 0.0)) * inv;
    }
  }
  loss /= scored;
  if (gradient == nullptr) return loss;

  gradient->assign(layout.size(), 0.0);
  auto gmat = [&](std::size_t off, int rows, int cols) {
    return MatrixMap(gradient->data() + off, rows, cols);
  };
  auto gvec = [&](std::size_t off, int rows) {
    return VectorMap(gradient->data() + off, rows);
  };

  gmat(layout.head_out(), kAlphabetSize, s) = dlogits * y.transpose();
  gvec(layout.head_out_bias(), kAlphabetSize) = dlogits.rowwise().sum();
  const MatrixXd dy_pre =
      ((ConstMatrixMap(params, layout.head_out(), kAlphabetSize, s).transpose() *
        dlogits).array() * (1.0 - y.array().square())).matrix();
  gmat(layout.head_hidden(), s, s) = dy_pre * a.transpose();
  gvec(layout.head_hidden_bias(), s) = dy_pre.rowwise().sum();
  MatrixXd dskip = MatrixXd::Zero(s, n);
  dskip.rightCols(scored) =
      ((ConstMatrixMap(params, layout.head_hidden(), s, s).transpose() * dy_pre)
           .array() * (1.0 - a.array().square())).matrix();

  MatrixXd dh = MatrixXd::Zero(c, n);
  MatrixXd dcond = MatrixXd::Zero(dim, n);
  for (int l = config.layers() - 1; l >= 0; --l) {
    const auto& L = layout.layer(l);
    const auto& k = caches[l];
    const int d = config.Dilation(l);
    MatrixXd dout = ConstMatrixMap(params, L.skip, s, c).transpose() * dskip;
    if (l + 1 < config.layers()) {
      dout += ConstMatrixMap(params, L.residual, c, c).transpose() * dh;
      gmat(L.residual, c, c) = dh * k.out.transpose();
      gvec(L.residual_bias, c) = dh.rowwise().sum();
    }
    gmat(L.skip, s, c) = dskip * k.out.transpose();
    gvec(L.skip_bias, s) = dskip.rowwise().sum();
    const MatrixXd dzf =
        (dout.array() * k.sg.array() * (1.0 - k.tf.array().square())).matrix();
    const MatrixXd dzg =
        (dout.array() * k.tf.array() * k.sg.array() * (1.0 - k.sg.array())).matrix();
    gmat(L.filter_past, c, c) = dzf * k.past.transpose();
    gmat(L.filter_now, c, c) = dzf * k.input.transpose();
    gmat(L.filter_cond, c, dim) = dzf * cond.transpose();
    gvec(L.filter_bias, c) = dzf.rowwise().sum();
    gmat(L.gate_past, c, c) = dzg * k.past.transpose();
    gmat(L.gate_now, c, c) = dzg * k.input.transpose();
    gmat(L.gate_cond, c, dim) = dzg * cond.transpose();
    gvec(L.gate_bias, c) = dzg.rowwise().sum();
    dcond += ConstMatrixMap(params, L.filter_cond, c, dim).transpose() * dzf +
             ConstMatrixMap(params, L.gate_cond, c, dim).transpose() * dzg;
    const MatrixXd dpast = ConstMatrixMap(params, L.filter_past, c, c).transpose() * dzf +
                           ConstMatrixMap(params, L.gate_past, c, c).transpose() * dzg;
    dh += ConstMatrixMap(params, L.filter_now, c, c).transpose() * dzf +
          ConstMatrixMap(params, L.gate_now, c, c).transpose() * dzg +
          ShiftLeft(dpast, d);
  }
  auto gemb = gmat(layout.embedding(), c, kAlphabetSize);
  for (int t = 0; t < n; ++t) gemb.col(inputs[t]) += dh.col(t);
  // Normalization parameters: reported for completeness, never trained.
  gvec(layout.cond_offset(), dim) =
      -(dcond.rowwise().sum().array() * scale.array()).matrix();
  gvec(layout.cond_scale(), dim) =
      (dcond.cwiseProduct(raw.colwise() - offset)).rowwise().sum();
  return loss;
}

namespace {

struct PreparedExample {
  std::vector<MuLawSymbol> symbols;
  std::vector<double> thetas;  // row-major, one row per sample
};

std::vector<PreparedExample> Prepare(const std::vector<TrainingExample>& corpus,
                                     int dim) {
  std::vector<PreparedExample> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& ex = corpus[i];
    if (ex.track.dim() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "example " + std::to_string(i) + " has conditioning dim " +
                      std::to_string(ex.track.dim()) + ", model expects " +
                      std::to_string(dim));
    }
    if (ex.track.rows() < ex.signal.size()) {
      throw Error(ErrorCode::kAlignment,
                  "example " + std::to_string(i) + " has " +
                      std::to_string(ex.track.rows()) + " conditioning rows for " +
                      std::to_string(ex.signal.size()) + " samples");
    }
    if (ex.signal.size() < 2) continue;
    PreparedExample p;
    p.symbols = MuLawEncode(ex.signal.samples);
    const auto values = ex.track.values();
    p.thetas.assign(values.begin(),
                    values.begin() + ex.signal.size() * static_cast<std::size_t>(dim));
    out.push_back(std::move(p));
  }
  if (out.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "training corpus has no usable signals");
  }
  return out;
}

void SetNormalization(const WaveNetLayout& layout,
                      const std::vector<PreparedExample>& data,
                      std::vector<double>* params) {
  const int dim = layout.config().conditioning_dim;
  std::vector<double> sum(dim, 0.0), sq(dim, 0.0);
  double count = 0.0;
  for (const auto& ex : data) {
    const std::size_t rows = ex.symbols.size();
    for (std::size_t r = 0; r < rows; ++r) {
      for (int i = 0; i < dim; ++i) {
        const double v = ex.thetas[r * dim + i];
        sum[i] += v;
        sq[i] += v * v;
      }
    }
    count += static_cast<double>(rows);
  }
  for (int i = 0; i < dim; ++i) {
    const double mean = sum[i] / count;
    const double var = std::max(0.0, sq[i] / count - mean * mean);
    const double sd = std::sqrt(var);
    (*params)[layout.cond_offset() + i] = mean;
    (*params)[layout.cond_scale() + i] = sd > 1e-6 ? 1.0 / sd : 1.0;
  }
}

}  // namespace

TrainResult Train(const std::vector<TrainingExample>& corpus,
                  const TrainConfig& config, const ModelWeights* initial) {
  if (config.steps < 0 || config.batch_size <= 0 || config.window <= 0 ||
      !(config.learning_rate > 0.0) || !(config.momentum >= 0.0) ||
      !(config.momentum < 1.0) || !(config.clip_norm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid training configuration");
  }
  const WaveNetLayout layout(config.architecture);
  const int dim = config.architecture.conditioning_dim;
  if (corpus.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "training corpus is empty");
  }
  const auto data = Prepare(corpus, dim);

  TrainResult result;
  if (initial != nullptr) {
    if (!(initial->config == config.architecture) ||
        initial->params.size() != layout.size()) {
      throw Error(ErrorCode::kConfigMismatch,
                  "resume weights do not match the configured architecture");
    }
    result.weights = *initial;
  } else {
    result.weights = InitWeights(config.architecture, config.seed);
    SetNormalization(layout, data, &result.weights.params);
  }
  auto& params = result.weights.params;

  std::vector<std::size_t> cumulative;
  std::size_t total = 0;
  for (const auto& ex : data) {
    total += ex.symbols.size();
    cumulative.push_back(total);
  }
  std::vector<bool> trainable(layout.size(), false);
  for (const auto& g : layout.groups()) {
    if (!layout.IsTrainable(g)) continue;
    std::fill(trainable.begin() + g.offset, trainable.begin() + g.offset + g.size(),
              true);
  }

  const std::size_t context = config.architecture.ReceptiveField() - 1;
  Rng rng(config.seed ^ 0x5eedf00dULL);
  std::vector<double> velocity(layout.size(), 0.0);
  std::vector<double> batch_grad(layout.size());
  std::vector<double> grad;
  double lr = config.learning_rate;
  std::size_t next_decay = 0;
  std::vector<double> decay_at = config.decay_at;
  std::sort(decay_at.begin(), decay_at.end());

  for (int step = 0; step < config.steps; ++step) {
    while (next_decay < decay_at.size() &&
           step >= decay_at[next_decay] * config.steps) {
      lr *= config.lr_decay;
      ++next_decay;
    }
    std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
    double batch_loss = 0.0;
    for (int b = 0; b < config.batch_size; ++b) {
      // Examples are drawn in proportion to their length.
      const std::size_t pick = rng.UniformInt(total);
      const auto& ex =
          data[std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
               cumulative.begin()];
      const std::size_t len = ex.symbols.size();
      const std::size_t want = context + static_cast<std::size_t>(config.window);
      std::size_t start = 0, span_len = len, first = 0;
      if (len > want) {
        start = rng.UniformInt(len - want + 1);
        span_len = want;
        first = context;
      } else {
        first = std::min(context, len - 1);
      }
      batch_loss += WindowLossAndGradient(
          layout, params,
          std::span<const MuLawSymbol>(ex.symbols).subspan(start, span_len),
          std::span<const double>(ex.thetas).subspan(start * dim, span_len * dim),
          first, &grad);
      for (std::size_t i = 0; i < grad.size(); ++i) batch_grad[i] += grad[i];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < batch_grad.size(); ++i) {
      if (!trainable[i]) continue;
      batch_grad[i] /= config.batch_size;
      norm += batch_grad[i] * batch_grad[i];
    }
    norm = std::sqrt(norm);
    const double clip = norm > config.clip_norm ? config.clip_norm / norm : 1.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!trainable[i]) continue;
      velocity[i] = config.momentum * velocity[i] - lr * clip * batch_grad[i];
      params[i] += velocity[i];
    }
    result.loss_bits.push_back(batch_loss / config.batch_size);
  }
  return result;
}

}  // namespace gvox
