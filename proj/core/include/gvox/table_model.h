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

#ifndef GVOX_TABLE_MODEL_H_
#define GVOX_TABLE_MODEL_H_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "gvox/model.h"
#include "gvox/parametric.h"

namespace gvox {

using SymbolRow = std::array<double, kAlphabetSize>;

// Next-symbol rows keyed by the previous `order` symbols. The key packs lag 1
// in the low byte, lag 2 in the next byte, and so on. Contexts without an
// entry use `fallback`.
struct ContextTable {
  SymbolRow fallback{};
  std::map<std::uint32_t, SymbolRow> rows;
};

std::uint32_t ContextKey(const SymbolHistory& history, int order);

// Finite-context model. Two flavours share this class:
//  - kFrequencyTable: counts estimated from a corpus (TrainFrequencyTable);
//    unseen contexts back off to the order-0 marginal.
//  - kMarkovOracle: rows configured by hand, optionally switching between
//    regimes on one conditioning coordinate (regime = clamp(round(theta[d]))).
// Conditioning vectors are checked for size but otherwise only used for the
// regime switch.
class ContextTableModel : public ConditionalModel {
 public:
  static constexpr int kMaxOrder = 3;

  // Rows are validated and, unless `normalize` is false (rows already
  // normalized, as when loading), rescaled to sum to one.
  ContextTableModel(ModelKind kind, int order, int conditioning_dim,
                    int regime_dim, std::vector<ContextTable> regimes,
                    bool normalize = true);

  ModelKind kind() const override { return kind_; }
  int conditioning_dim() const override { return conditioning_dim_; }
  int receptive_field() const override { return order_; }
  std::unique_ptr<ModelSession> NewSession() const override;
  void SerializeBody(std::vector<std::uint8_t>* out) const override;

  int order() const { return order_; }
  int regime_dim() const { return regime_dim_; }
  const std::vector<ContextTable>& regimes() const { return regimes_; }

  // The (unfloored, normalized) row used for a given context and regime.
  const SymbolRow& RowFor(int regime, std::uint32_t key) const;
  int RegimeFor(std::span<const double> theta) const;

  static std::unique_ptr<ContextTableModel> Deserialize(
      ModelKind kind, std::span<const std::uint8_t> body);

 private:
  ModelKind kind_;
  int order_;
  int conditioning_dim_;
  int regime_dim_;
  std::vector<ContextTable> regimes_;
};

// Order-k (k <= 3) count model trained on the mu-law symbols of a corpus.
std::unique_ptr<ContextTableModel> TrainFrequencyTable(
    const std::vector<PcmSignal>& corpus, int order,
    int conditioning_dim = kConditioningDim);

// Synthetic source with a known entropy rate. Rows are normalized on
// construction.
std::unique_ptr<ContextTableModel> MakeMarkovOracle(
    int order, std::vector<ContextTable> regimes,
    int conditioning_dim = kConditioningDim, int regime_dim = -1);

// Order-1 chain given as a dense 256x256 row-stochastic matrix.
std::unique_ptr<ContextTableModel> MakeOrder1Oracle(
    const std::vector<SymbolRow>& transition,
    int conditioning_dim = kConditioningDim);

}  // namespace gvox

#endif  // GVOX_TABLE_MODEL_H_
