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

#include "gvox/wavenet.h"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "bytes.h"
#include "gvox/error.h"
#include "gvox/rng.h"
#include "wavenet_math.h"

namespace gvox {

using internal::ConstMatrixMap;
using internal::ConstVectorMap;

int WaveNetConfig::ReceptiveField() const {
  int sum = 0;
  for (int l = 0; l < layers(); ++l) sum += Dilation(l);
  return sum + 1;
}

WaveNetLayout::WaveNetLayout(const WaveNetConfig& config) : config_(config) {
  if (config.conditioning_dim < 0 || config.residual_channels <= 0 ||
      config.skip_channels <= 0 || config.stacks <= 0 ||
      config.layers_per_stack <= 0 || config.layers_per_stack > 16) {
    throw Error(ErrorCode::kInvalidArgument, "invalid WaveNet architecture");
  }
  const int c = config.residual_channels;
  const int s = config.skip_channels;
  const int d = config.conditioning_dim;
  cond_offset_ = Add("cond_offset", d, 1);
  cond_scale_ = Add("cond_scale", d, 1);
  embedding_ = Add("embedding", c, kAlphabetSize);
  for (int l = 0; l < config.layers(); ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    Layer layer{};
    layer.filter_past = Add(p + "filter_past", c, c);
    layer.filter_now = Add(p + "filter_now", c, c);
    layer.gate_past = Add(p + "gate_past", c, c);
    layer.gate_now = Add(p + "gate_now", c, c);
    layer.filter_bias = Add(p + "filter_bias", c, 1);
    layer.gate_bias = Add(p + "gate_bias", c, 1);
    layer.filter_cond = Add(p + "filter_cond", c, d);
    layer.gate_cond = Add(p + "gate_cond", c, d);
    if (l + 1 < config.layers()) {
      layer.residual = Add(p + "residual", c, c);
      layer.residual_bias = Add(p + "residual_bias", c, 1);
    }
    layer.skip = Add(p + "skip", s, c);
    layer.skip_bias = Add(p + "skip_bias", s, 1);
    layers_.push_back(layer);
  }
  head_hidden_ = Add("head.hidden", s, s);
  head_hidden_bias_ = Add("head.hidden_bias", s, 1);
  head_out_ = Add("head.out", kAlphabetSize, s);
  head_out_bias_ = Add("head.out_bias", kAlphabetSize, 1);
}

std::size_t WaveNetLayout::Add(const std::string& name, int rows, int cols) {
  const std::size_t offset = size_;
  groups_.push_back(ParameterGroup{name, rows, cols, offset});
  size_ += static_cast<std::size_t>(rows) * cols;
  return offset;
}

bool WaveNetLayout::IsTrainable(const ParameterGroup& group) const {
  return group.offset != cond_offset_ && group.offset != cond_scale_;
}

ModelWeights InitWeights(const WaveNetConfig& config, std::uint64_t seed) {
  const WaveNetLayout layout(config);
  ModelWeights weights{config, std::vector<double>(layout.size(), 0.0)};
  Rng rng(seed);
  for (const auto& g : layout.groups()) {
    double* p = weights.params.data() + g.offset;
    if (g.offset == layout.cond_scale()) {
      std::fill(p, p + g.size(), 1.0);
      continue;
    }
    if (g.cols == 1 || g.offset == layout.cond_offset()) continue;  // biases
    double scale = 1.0 / std::sqrt(static_cast<double>(g.cols));
    if (g.offset == layout.embedding()) scale = 1.0;
    if (g.name.ends_with(".residual") || g.name.ends_with(".skip")) scale *= 0.5;
    if (g.offset == layout.head_out()) scale *= 0.1;
    for (std::size_t i = 0; i < g.size(); ++i) p[i] = scale * rng.Gaussian();
  }
  return weights;
}

namespace internal {

Eigen::VectorXd NormalizeTheta(const WaveNetLayout& layout,
                               std::span<const double> params,
                               std::span<const double> theta) {
  const int d = layout.config().conditioning_dim;
  Eigen::VectorXd out(d);
  for (int i = 0; i < d; ++i) {
    out[i] = (theta[i] - params[layout.cond_offset() + i]) *
             params[layout.cond_scale() + i];
  }
  return out;
}

SymbolDistribution HeadDistribution(const WaveNetLayout& layout,
                                    std::span<const double> params,
                                    const Eigen::VectorXd& skip) {
  const int s = layout.config().skip_channels;
  const Eigen::VectorXd a = skip.array().tanh();
  const Eigen::VectorXd y =
      (ConstMatrixMap(params, layout.head_hidden(), s, s) * a +
       ConstVectorMap(params, layout.head_hidden_bias(), s))
          .array()
          .tanh();
  const Eigen::VectorXd logits =
      ConstMatrixMap(params, layout.head_out(), kAlphabetSize, s) * y +
      ConstVectorMap(params, layout.head_out_bias(), kAlphabetSize);
  std::array<double, kAlphabetSize> probs;
  Softmax(logits.data(), probs.data());
  return SymbolDistribution::FromWeights(probs);
}

}  // namespace internal

class WaveNetSession : public ModelSession {
 public:
  explicit WaveNetSession(const WaveNetModel* model)
      : layout_(&model->layout_),
        params_(model->weights_.params),
        history_(model->receptive_field()) {
    const auto& config = layout_->config();
    const int c = config.residual_channels;
    for (int l = 0; l < config.layers(); ++l) {
      const int d = config.Dilation(l);
      Eigen::Map<const Eigen::VectorXd> pad(model->padding_[l].data(), c);
      rings_.emplace_back(d, Eigen::VectorXd(pad));
      pending_.emplace_back(Eigen::VectorXd::Zero(c));
    }
    last_theta_.assign(config.conditioning_dim, 0.0);
  }

  SymbolDistribution NextDistribution(std::span<const double> theta) override {
    const auto& config = layout_->config();
    if (static_cast<int>(theta.size()) != config.conditioning_dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "theta has " + std::to_string(theta.size()) +
                      " entries, model expects " +
                      std::to_string(config.conditioning_dim));
    }
    last_theta_.assign(theta.begin(), theta.end());
    const int c = config.residual_channels;
    const int s = config.skip_channels;
    const int dim = config.conditioning_dim;
    const Eigen::VectorXd cond = internal::NormalizeTheta(*layout_, params_, theta);

    Eigen::VectorXd h =
        ConstMatrixMap(params_, layout_->embedding(), c, kAlphabetSize).col(input_);
    Eigen::VectorXd skip = Eigen::VectorXd::Zero(s);
    for (int l = 0; l < config.layers(); ++l) {
      const auto& L = layout_->layer(l);
      const auto& past = rings_[l][position_ % rings_[l].size()];
      const Eigen::VectorXd zf = ConstMatrixMap(params_, L.filter_past, c, c) * past +
                                 ConstMatrixMap(params_, L.filter_now, c, c) * h +
                                 ConstMatrixMap(params_, L.filter_cond, c, dim) * cond +
                                 ConstVectorMap(params_, L.filter_bias, c);
      const Eigen::VectorXd zg = ConstMatrixMap(params_, L.gate_past, c, c) * past +
                                 ConstMatrixMap(params_, L.gate_now, c, c) * h +
                                 ConstMatrixMap(params_, L.gate_cond, c, dim) * cond +
                                 ConstVectorMap(params_, L.gate_bias, c);
      const Eigen::VectorXd o =
          zf.array().tanh() * (1.0 / (1.0 + (-zg.array()).exp()));
      skip += ConstMatrixMap(params_, L.skip, s, c) * o +
              ConstVectorMap(params_, L.skip_bias, s);
      pending_[l] = h;
      if (l + 1 == config.layers()) break;
      h += ConstMatrixMap(params_, L.residual, c, c) * o +
           ConstVectorMap(params_, L.residual_bias, c);
    }
    pending_valid_ = true;
    return internal::HeadDistribution(*layout_, params_, skip);
  }

  void Advance(MuLawSymbol symbol) override {
    // Advancing without a query uses the last conditioning row seen.
    if (!pending_valid_) NextDistribution(last_theta_);
    for (std::size_t l = 0; l < rings_.size(); ++l) {
      rings_[l][position_ % rings_[l].size()] = pending_[l];
    }
    ++position_;
    input_ = symbol;
    history_.Push(symbol);
    pending_valid_ = false;
  }

  const SymbolHistory& history() const override { return history_; }

 private:
  const WaveNetLayout* layout_;
  std::span<const double> params_;
  SymbolHistory history_;
  // rings_[l][t % d] holds the layer-l input at position t - d.
  std::vector<std::vector<Eigen::VectorXd>> rings_;
  std::vector<Eigen::VectorXd> pending_;
  bool pending_valid_ = false;
  std::vector<double> last_theta_;
  std::size_t position_ = 0;
  MuLawSymbol input_ = kMuLawZero;
};

WaveNetModel::WaveNetModel(ModelWeights weights)
    : weights_(std::move(weights)), layout_(weights_.config) {
  if (weights_.params.size() != layout_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "weights have " + std::to_string(weights_.params.size()) +
                    " parameters, architecture needs " +
                    std::to_string(layout_.size()));
  }
  for (double v : weights_.params) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite weight");
    }
  }
  // Fixed point of each layer when every input is the zero code and the
  // normalized conditioning is zero.
  const auto& config = weights_.config;
  const int c = config.residual_channels;
  const std::span<const double> p(weights_.params);
  Eigen::VectorXd h = ConstMatrixMap(p, layout_.embedding(), c, kAlphabetSize)
                          .col(kMuLawZero);
  for (int l = 0; l < config.layers(); ++l) {
    const auto& L = layout_.layer(l);
    padding_.emplace_back(h.data(), h.data() + c);
    const Eigen::VectorXd zf = (ConstMatrixMap(p, L.filter_past, c, c) +
                                ConstMatrixMap(p, L.filter_now, c, c)) * h +
                               ConstVectorMap(p, L.filter_bias, c);
    const Eigen::VectorXd zg = (ConstMatrixMap(p, L.gate_past, c, c) +
                                ConstMatrixMap(p, L.gate_now, c, c)) * h +
                               ConstVectorMap(p, L.gate_bias, c);
    if (l + 1 == config.layers()) break;
    const Eigen::VectorXd o = zf.array().tanh() * (1.0 / (1.0 + (-zg.array()).exp()));
    h += ConstMatrixMap(p, L.residual, c, c) * o + ConstVectorMap(p, L.residual_bias, c);
  }
}

std::unique_ptr<ModelSession> WaveNetModel::NewSession() const {
  return std::make_unique<WaveNetSession>(this);
}

SymbolDistribution WaveNetModel::ReferenceDistribution(
    std::span<const MuLawSymbol> history,
    const std::vector<std::vector<double>>& thetas) const {
  const auto& config = weights_.config;
  const std::size_t positions = history.size() + 1;
  if (thetas.size() != positions) {
    throw Error(ErrorCode::kAlignment, "need one theta row per position");
  }
  const int c = config.residual_channels;
  const int s = config.skip_channels;
  const int dim = config.conditioning_dim;
  const auto& p = weights_.params;
  // Plain loops over column-major parameter blocks.
  auto w = [&p](std::size_t off, int rows, int r, int col) {
    return p[off + static_cast<std::size_t>(col) * rows + r];
  };

  std::vector<std::vector<double>> cond(positions, std::vector<double>(dim));
  for (std::size_t t = 0; t < positions; ++t) {
    if (static_cast<int>(thetas[t].size()) != dim) {
      throw Error(ErrorCode::kDimensionMismatch, "theta row size");
    }
    for (int i = 0; i < dim; ++i) {
      cond[t][i] = (thetas[t][i] - p[layout_.cond_offset() + i]) *
                   p[layout_.cond_scale() + i];
    }
  }
  std::vector<std::vector<double>> h(positions, std::vector<double>(c));
  for (std::size_t t = 0; t < positions; ++t) {
    const int input = t == 0 ? kMuLawZero : history[t - 1];
    for (int i = 0; i < c; ++i) h[t][i] = w(layout_.embedding(), c, i, input);
  }
  std::vector<double> skip(s, 0.0);
  for (int l = 0; l < config.layers(); ++l) {
    const auto& L = layout_.layer(l);
    const int d = config.Dilation(l);
    auto next = h;
    for (std::size_t t = 0; t < positions; ++t) {
      const std::vector<double>& past =
          t >= static_cast<std::size_t>(d) ? h[t - d] : padding_[l];
      std::vector<double> o(c);
      for (int i = 0; i < c; ++i) {
        double zf = p[L.filter_bias + i], zg = p[L.gate_bias + i];
        for (int j = 0; j < c; ++j) {
          zf += w(L.filter_past, c, i, j) * past[j] + w(L.filter_now, c, i, j) * h[t][j];
          zg += w(L.gate_past, c, i, j) * past[j] + w(L.gate_now, c, i, j) * h[t][j];
        }
        for (int j = 0; j < dim; ++j) {
          zf += w(L.filter_cond, c, i, j) * cond[t][j];
          zg += w(L.gate_cond, c, i, j) * cond[t][j];
        }
        o[i] = std::tanh(zf) / (1.0 + std::exp(-zg));
      }
      for (int i = 0; i < c && l + 1 < config.layers(); ++i) {
        double r = p[L.residual_bias + i];
        for (int j = 0; j < c; ++j) r += w(L.residual, c, i, j) * o[j];
        next[t][i] += r;
      }
      if (t + 1 == positions) {
        for (int i = 0; i < s; ++i) {
          double v = p[L.skip_bias + i];
          for (int j = 0; j < c; ++j) v += w(L.skip, s, i, j) * o[j];
          skip[i] += v;
        }
      }
    }
    h = std::move(next);
  }
  std::vector<double> a(s), y(s);
  for (int i = 0; i < s; ++i) a[i] = std::tanh(skip[i]);
  for (int i = 0; i < s; ++i) {
    double v = p[layout_.head_hidden_bias() + i];
    for (int j = 0; j < s; ++j) v += w(layout_.head_hidden(), s, i, j) * a[j];
    y[i] = std::tanh(v);
  }
  std::array<double, kAlphabetSize> logits, probs;
  for (int k = 0; k < kAlphabetSize; ++k) {
    double v = p[layout_.head_out_bias() + k];
    for (int j = 0; j < s; ++j) v += w(layout_.head_out(), kAlphabetSize, k, j) * y[j];
    logits[k] = v;
  }
  internal::Softmax(logits.data(), probs.data());
  return SymbolDistribution::FromWeights(probs);
}

void WaveNetModel::SerializeBody(std::vector<std::uint8_t>* out) const {
  const auto& c = weights_.config;
  internal::PutU32(out, static_cast<std::uint32_t>(c.conditioning_dim));
  internal::PutU32(out, static_cast<std::uint32_t>(c.residual_channels));
  internal::PutU32(out, static_cast<std::uint32_t>(c.skip_channels));
  internal::PutU32(out, static_cast<std::uint32_t>(c.stacks));
  internal::PutU32(out, static_cast<std::uint32_t>(c.layers_per_stack));
  internal::PutU64(out, weights_.params.size());
  for (double v : weights_.params) internal::PutF64(out, v);
}

std::unique_ptr<WaveNetModel> WaveNetModel::Deserialize(
    std::span<const std::uint8_t> body) {
  internal::ByteReader reader(body, "wavenet weights");
  WaveNetConfig config;
  config.conditioning_dim = static_cast<int>(reader.U32());
  config.residual_channels = static_cast<int>(reader.U32());
  config.skip_channels = static_cast<int>(reader.U32());
  config.stacks = static_cast<int>(reader.U32());
  config.layers_per_stack = static_cast<int>(reader.U32());
  const WaveNetLayout layout(config);
  const std::uint64_t count = reader.U64();
  if (count != layout.size()) {
    throw Error(ErrorCode::kMalformedHeader,
                "parameter count " + std::to_string(count) +
                    " does not match architecture (" +
                    std::to_string(layout.size()) + ")");
  }
  ModelWeights weights{config, std::vector<double>(count)};
  for (double& v : weights.params) v = reader.F64();
  if (reader.remaining() != 0) {
    throw Error(ErrorCode::kMalformedHeader, "trailing bytes in weights body");
  }
  return std::make_unique<WaveNetModel>(std::move(weights));
}

}  // namespace gvox
