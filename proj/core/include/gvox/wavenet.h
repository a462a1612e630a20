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

#ifndef GVOX_WAVENET_H_
#define GVOX_WAVENET_H_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gvox/model.h"
#include "gvox/parametric.h"

namespace gvox {

// Gated dilated-convolution network over mu-law symbols. Kernel size 2,
// dilations 1, 2, ..., 2^(layers_per_stack-1) repeated `stacks` times.
//
// At position t the input is the previous symbol n_{t-1} (one-hot, i.e. an
// embedding row) and the conditioning row theta_t. Every layer sees theta_t
// through its own projection added before the gates:
//   z_f = Wf0 h[t-d] + Wf1 h[t] + Vf theta'_t + bf       (same for z_g)
//   o   = tanh(z_f) * sigmoid(z_g)
//   h'  = h + Wr o + br,  skip += Ws o + bs
// The last layer has no residual projection (nothing reads its output).
// The head is logits = W2 tanh(W1 tanh(skip) + b1) + b2 and the output PMF is
// softmax(logits), floored by SymbolDistribution for coding. Training
// minimizes the cross-entropy of the unfloored softmax.
//
// theta' = (theta - cond_offset) * cond_scale, with offset/scale fixed from
// the training corpus at initialization.
//
// Positions before the start of a stream see the mu-law zero symbol and a
// zero theta'; their activations are the constant fixed point of each
// layer, which both inference paths use.
struct WaveNetConfig {
  int conditioning_dim = kConditioningDim;
  int residual_channels = 32;
  int skip_channels = 64;
  int stacks = 2;
  int layers_per_stack = 6;

  int layers() const { return stacks * layers_per_stack; }
  int Dilation(int layer) const { return 1 << (layer % layers_per_stack); }
  // Number of past symbols a distribution depends on.
  int ReceptiveField() const;

  bool operator==(const WaveNetConfig&) const = default;
};

// Named slice of the flat parameter vector, column-major rows x cols.
struct ParameterGroup {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;

  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

class WaveNetLayout {
 public:
  explicit WaveNetLayout(const WaveNetConfig& config);

  struct Layer {
    std::size_t filter_past, filter_now, gate_past, gate_now;  // C x C
    std::size_t filter_bias, gate_bias;                        // C
    std::size_t filter_cond, gate_cond;                        // C x D
    std::size_t residual, residual_bias;  // C x C, C; absent on the last layer
    std::size_t skip, skip_bias;                               // S x C, S
  };

  const WaveNetConfig& config() const { return config_; }
  std::size_t size() const { return size_; }
  const std::vector<ParameterGroup>& groups() const { return groups_; }

  std::size_t cond_offset() const { return cond_offset_; }  // D
  std::size_t cond_scale() const { return cond_scale_; }    // D
  std::size_t embedding() const { return embedding_; }      // C x 256
  const Layer& layer(int l) const { return layers_[l]; }
  std::size_t head_hidden() const { return head_hidden_; }       // S x S
  std::size_t head_hidden_bias() const { return head_hidden_bias_; }
  std::size_t head_out() const { return head_out_; }             // 256 x S
  std::size_t head_out_bias() const { return head_out_bias_; }   // 256

  // Groups excluded from gradient descent (conditioning normalization).
  bool IsTrainable(const ParameterGroup& group) const;

 private:
  std::size_t Add(const std::string& name, int rows, int cols);

  WaveNetConfig config_;
  std::size_t size_ = 0;
  std::vector<ParameterGroup> groups_;
  std::size_t cond_offset_ = 0, cond_scale_ = 0, embedding_ = 0;
  std::vector<Layer> layers_;
  std::size_t head_hidden_ = 0, head_hidden_bias_ = 0;
  std::size_t head_out_ = 0, head_out_bias_ = 0;
};

struct ModelWeights {
  WaveNetConfig config;
  std::vector<double> params;  // WaveNetLayout(config).size() values

  bool operator==(const ModelWeights&) const = default;
};

// Gaussian init scaled by 1/sqrt(fan_in), unit conditioning normalization.
ModelWeights InitWeights(const WaveNetConfig& config, std::uint64_t seed);

class WaveNetModel : public ConditionalModel {
 public:
  explicit WaveNetModel(ModelWeights weights);

  ModelKind kind() const override { return ModelKind::kWaveNet; }
  int conditioning_dim() const override {
    return weights_.config.conditioning_dim;
  }
  int receptive_field() const override {
    return weights_.config.ReceptiveField();
  }
  std::unique_ptr<ModelSession> NewSession() const override;
  void SerializeBody(std::vector<std::uint8_t>* out) const override;

  const ModelWeights& weights() const { return weights_; }
  const WaveNetLayout& layout() const { return layout_; }

  // Distribution for the position following `history` (oldest first),
  // recomputing every activation from scratch. thetas holds one row per
  // position, i.e. history.size() + 1 rows. Quadratic cost; used to check
  // the incremental path.
  SymbolDistribution ReferenceDistribution(
      std::span<const MuLawSymbol> history,
      const std::vector<std::vector<double>>& thetas) const;

  static std::unique_ptr<WaveNetModel> Deserialize(
      std::span<const std::uint8_t> body);

 private:
  friend class WaveNetSession;

  ModelWeights weights_;
  WaveNetLayout layout_;
  // Per-layer activation at positions before the stream start.
  std::vector<std::vector<double>> padding_;
};

// ---------------------------------------------------------------------------
// Training.
// ---------------------------------------------------------------------------

struct TrainConfig {
  WaveNetConfig architecture;
  std::uint64_t seed = 1;
  int steps = 400;
  int batch_size = 4;
  int window = 256;  // scored positions per batch item
  double learning_rate = 0.05;
  double momentum = 0.9;
  // Learning rate is multiplied by lr_decay at each listed step fraction.
  std::vector<double> decay_at = {0.6, 0.85};
  double lr_decay = 0.3;
  double clip_norm = 5.0;
};

struct TrainingExample {
  PcmSignal signal;  // 16 kHz (any rate is accepted)
  ConditioningTrack track;
};

struct TrainResult {
  ModelWeights weights;
  std::vector<double> loss_bits;  // mean cross-entropy per step, bits/symbol
};

// Mini-batch momentum SGD on next-symbol cross-entropy. Deterministic given
// config.seed. If `initial` is supplied training resumes from it (its
// architecture must equal config.architecture).
TrainResult Train(const std::vector<TrainingExample>& corpus,
                  const TrainConfig& config,
                  const ModelWeights* initial = nullptr);

// Mean cross-entropy (bits/symbol) and its gradient for one window.
// Positions [0, first_scored) are context only. thetas has one row per
// position (symbols.size() rows, each conditioning_dim long). The target at
// position t is symbols[t]; the input is symbols[t-1] (zero code at t = 0).
// Dilated taps that reach before position 0 read zero activations.
double WindowLossAndGradient(const WaveNetLayout& layout,
                             std::span<const double> params,
                             std::span<const MuLawSymbol> symbols,
                             std::span<const double> thetas,
                             std::size_t first_scored,
                             std::vector<double>* gradient);

}  // namespace gvox

#endif  // GVOX_WAVENET_H_
