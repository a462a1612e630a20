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

#include "gvox/table_model.h"

#include <algorithm>
#include <cmath>

#include "bytes.h"
#include "gvox/error.h"

namespace gvox {
namespace {

void Normalize(SymbolRow* row, bool rescale) {
  double sum = 0.0;
  for (double v : *row) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "negative or non-finite row entry");
    }
    sum += v;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::kInvalidArgument, "empty row");
  if (!rescale) return;
  for (double& v : *row) v /= sum;
}

class TableSession : public ModelSession {
 public:
  explicit TableSession(const ContextTableModel* model)
      : model_(model), history_(model->order()) {}

  SymbolDistribution NextDistribution(std::span<const double> theta) override {
    if (static_cast<int>(theta.size()) != model_->conditioning_dim()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "theta has " + std::to_string(theta.size()) +
                      " entries, model expects " +
                      std::to_string(model_->conditioning_dim()));
    }
    const int regime = model_->RegimeFor(theta);
    return SymbolDistribution::FromWeights(
        model_->RowFor(regime, ContextKey(history_, model_->order())));
  }

  void Advance(MuLawSymbol symbol) override { history_.Push(symbol); }

  const SymbolHistory& history() const override { return history_; }

 private:
  const ContextTableModel* model_;
  SymbolHistory history_;
};

void PutRow(std::vector<std::uint8_t>* out, const SymbolRow& row) {
  for (double v : row) internal::PutF64(out, v);
}

SymbolRow GetRow(internal::ByteReader* reader) {
  SymbolRow row;
  for (double& v : row) v = reader->F64();
  return row;
}

}  // namespace

std::uint32_t ContextKey(const SymbolHistory& history, int order) {
  std::uint32_t key = 0;
  for (int lag = order; lag >= 1; --lag) key = (key << 8) | history.Lag(lag);
  return key;
}

ContextTableModel::ContextTableModel(ModelKind kind, int order,
                                     int conditioning_dim, int regime_dim,
                                     std::vector<ContextTable> regimes,
                                     bool normalize)
    : kind_(kind),
      order_(order),
      conditioning_dim_(conditioning_dim),
      regime_dim_(regime_dim),
      regimes_(std::move(regimes)) {
  if (order_ < 0 || order_ > kMaxOrder) {
    throw Error(ErrorCode::kInvalidArgument,
                "context order must be in [0, 3], got " + std::to_string(order_));
  }
  if (conditioning_dim_ < 0 || regime_dim_ >= conditioning_dim_ || regime_dim_ < -1) {
    throw Error(ErrorCode::kInvalidArgument, "bad regime/conditioning dimension");
  }
  if (regimes_.empty()) throw Error(ErrorCode::kInvalidArgument, "no regimes");
  if (regime_dim_ < 0 && regimes_.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "several regimes need a regime_dim");
  }
  for (auto& table : regimes_) {
    Normalize(&table.fallback, normalize);
    for (auto& [key, row] : table.rows) {
      if ((static_cast<std::uint64_t>(key) >> (8 * order_)) != 0) {
        throw Error(ErrorCode::kInvalidArgument, "context key wider than order");
      }
      Normalize(&row, normalize);
    }
  }
}

std::unique_ptr<ModelSession> ContextTableModel::NewSession() const {
  return std::make_unique<TableSession>(this);
}

int ContextTableModel::RegimeFor(std::span<const double> theta) const {
  if (regime_dim_ < 0) return 0;
  const double v = theta[static_cast<std::size_t>(regime_dim_)];
  const long r = std::isfinite(v) ? std::lround(v) : 0;
  return static_cast<int>(
      std::clamp<long>(r, 0, static_cast<long>(regimes_.size()) - 1));
}

const SymbolRow& ContextTableModel::RowFor(int regime, std::uint32_t key) const {
  const auto& table = regimes_[static_cast<std::size_t>(regime)];
  auto it = table.rows.find(key);
  return it == table.rows.end() ? table.fallback : it->second;
}

void ContextTableModel::SerializeBody(std::vector<std::uint8_t>* out) const {
  internal::PutU32(out, static_cast<std::uint32_t>(order_));
  internal::PutU32(out, static_cast<std::uint32_t>(conditioning_dim_));
  internal::PutU32(out, static_cast<std::uint32_t>(regime_dim_));
  internal::PutU32(out, static_cast<std::uint32_t>(regimes_.size()));
  for (const auto& table : regimes_) {
    PutRow(out, table.fallback);
    internal::PutU32(out, static_cast<std::uint32_t>(table.rows.size()));
    for (const auto& [key, row] : table.rows) {
      internal::PutU32(out, key);
      PutRow(out, row);
    }
  }
}

std::unique_ptr<ContextTableModel> ContextTableModel::Deserialize(
    ModelKind kind, std::span<const std::uint8_t> body) {
  internal::ByteReader reader(body, "context table weights");
  const int order = static_cast<int>(reader.U32());
  const int dim = static_cast<int>(reader.U32());
  const int regime_dim = static_cast<int>(static_cast<std::int32_t>(reader.U32()));
  const std::uint32_t count = reader.U32();
  if (count == 0 || count > 256) {
    throw Error(ErrorCode::kMalformedHeader, "bad regime count");
  }
  std::vector<ContextTable> regimes(count);
  for (auto& table : regimes) {
    table.fallback = GetRow(&reader);
    const std::uint32_t rows = reader.U32();
    for (std::uint32_t i = 0; i < rows; ++i) {
      const std::uint32_t key = reader.U32();
      table.rows.emplace(key, GetRow(&reader));
    }
  }
  if (reader.remaining() != 0) {
    throw Error(ErrorCode::kMalformedHeader, "trailing bytes in weights body");
  }
  // Stored rows are already normalized; rescaling again could move bits.
  return std::make_unique<ContextTableModel>(kind, order, dim, regime_dim,
                                             std::move(regimes), false);
}

std::unique_ptr<ContextTableModel> TrainFrequencyTable(
    const std::vector<PcmSignal>& corpus, int order, int conditioning_dim) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no training signals");
  std::map<std::uint32_t, SymbolRow> counts;
  SymbolRow marginal{};
  std::size_t total = 0;
  for (const auto& signal : corpus) {
    SymbolHistory history(order);
    for (std::int16_t s : signal.samples) {
      const MuLawSymbol n = MuLawEncode(s);
      auto [it, inserted] = counts.try_emplace(ContextKey(history, order));
      it->second[n] += 1.0;
      marginal[n] += 1.0;
      ++total;
      history.Push(n);
    }
  }
  if (total == 0) throw Error(ErrorCode::kEmptyCorpus, "corpus has no samples");
  ContextTable table;
  table.fallback = marginal;
  table.rows = std::move(counts);
  std::vector<ContextTable> regimes;
  regimes.push_back(std::move(table));
  return std::make_unique<ContextTableModel>(ModelKind::kFrequencyTable, order,
                                             conditioning_dim, -1,
                                             std::move(regimes));
}

std::unique_ptr<ContextTableModel> MakeMarkovOracle(int order,
                                                    std::vector<ContextTable> regimes,
                                                    int conditioning_dim,
                                                    int regime_dim) {
  return std::make_unique<ContextTableModel>(ModelKind::kMarkovOracle, order,
                                             conditioning_dim, regime_dim,
                                             std::move(regimes));
}

std::unique_ptr<ContextTableModel> MakeOrder1Oracle(
    const std::vector<SymbolRow>& transition, int conditioning_dim) {
  if (transition.size() != kAlphabetSize) {
    throw Error(ErrorCode::kInvalidArgument, "transition matrix must be 256x256");
  }
  ContextTable table;
  table.fallback = transition[kMuLawZero];
  for (int s = 0; s < kAlphabetSize; ++s) {
    table.rows.emplace(static_cast<std::uint32_t>(s), transition[s]);
  }
  std::vector<ContextTable> regimes;
  regimes.push_back(std::move(table));
  return MakeMarkovOracle(1, std::move(regimes), conditioning_dim, -1);
}

}  // namespace gvox
