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

#ifndef GVOX_MODEL_H_
#define GVOX_MODEL_H_

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gvox/rng.h"
#include "gvox/signal_io.h"

namespace gvox {

// Smallest probability any symbol may carry, so the entropy coder can code
// every symbol.
inline constexpr double kProbFloor = 1.0 / 65536.0;

// A PMF over the 256 mu-law symbols. Always normalized with every entry at
// least kProbFloor.
class SymbolDistribution {
 public:
  // Normalizes `weights` (non-negative, positive sum). If any normalized
  // entry is below kProbFloor the result is the mixture
  // kProbFloor + (1 - 256 kProbFloor) p, otherwise p itself.
  static SymbolDistribution FromWeights(std::span<const double> weights);
  static SymbolDistribution Uniform();
  static SymbolDistribution PointMass(MuLawSymbol symbol);

  double operator[](int symbol) const { return probs_[symbol]; }
  const std::array<double, kAlphabetSize>& probs() const { return probs_; }
  // The distribution before flooring. The floor is a coding device, so
  // sampling draws from this.
  std::array<double, kAlphabetSize> Unfloored() const;
  bool floored() const { return floored_; }

  bool operator==(const SymbolDistribution&) const = default;

 private:
  SymbolDistribution() = default;

  std::array<double, kAlphabetSize> probs_{};
  bool floored_ = false;
};

// Draws from Unfloored()^(1/temperature), renormalized. Temperatures below
// kArgmaxTemperature select the most probable symbol (lowest index on ties).
inline constexpr double kArgmaxTemperature = 1e-3;
MuLawSymbol SampleSymbol(const SymbolDistribution& dist, Rng& rng,
                         double temperature = 1.0);

// Fixed-length window of the most recent symbols, oldest first. Starts filled
// with the mu-law zero code.
class SymbolHistory {
 public:
  explicit SymbolHistory(int length);

  void Push(MuLawSymbol symbol);
  int length() const { return static_cast<int>(buffer_.size()); }
  // lag 1 is the most recent symbol.
  MuLawSymbol Lag(int lag) const;
  std::vector<MuLawSymbol> Snapshot() const;

 private:
  std::vector<MuLawSymbol> buffer_;
  int head_ = 0;  // index of the oldest symbol
};

// Autoregressive inference state for one stream. Calls alternate
// NextDistribution(theta_i) -> Advance(n_i).
class ModelSession {
 public:
  virtual ~ModelSession() = default;

  // Throws Error(kDimensionMismatch) if theta has the wrong size.
  virtual SymbolDistribution NextDistribution(std::span<const double> theta) = 0;
  virtual void Advance(MuLawSymbol symbol) = 0;

  virtual const SymbolHistory& history() const = 0;
};

enum class ModelKind : std::uint32_t {
  kWaveNet = 0,
  kFrequencyTable = 1,
  kMarkovOracle = 2,
};

const char* ModelKindName(ModelKind kind);

class ConditionalModel {
 public:
  virtual ~ConditionalModel() = default;

  virtual ModelKind kind() const = 0;
  virtual int conditioning_dim() const = 0;
  virtual int receptive_field() const = 0;
  virtual std::unique_ptr<ModelSession> NewSession() const = 0;

  // Architecture block followed by the parameter payload, without the file
  // header or checksum (see SaveModel).
  virtual void SerializeBody(std::vector<std::uint8_t>* out) const = 0;
};

// ---------------------------------------------------------------------------
// Weights file: "GVOXNN01", u32 version, u32 model kind, model-specific
// architecture block and little-endian float64 tensors in declared order,
// trailing CRC32 (zlib polynomial) over all preceding bytes.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kWeightsVersion = 1;

std::vector<std::uint8_t> SaveModel(const ConditionalModel& model);
std::unique_ptr<ConditionalModel> LoadModel(std::span<const std::uint8_t> bytes);
std::unique_ptr<ConditionalModel> LoadModelFile(
    const std::filesystem::path& path);
void SaveModelFile(const ConditionalModel& model,
                   const std::filesystem::path& path);

using ModelFingerprint = std::array<std::uint8_t, 32>;

// SHA-256 of the saved weights bytes; identifies the model in waveform
// bitstreams.
ModelFingerprint Fingerprint(const ConditionalModel& model);
std::string ToHex(std::span<const std::uint8_t> bytes);

// Log-likelihood of a signal under teacher forcing on its own mu-law
// symbols.
struct LogLikelihoodTrace {
  std::vector<double> log2_prob;  // log2 q_i(n_i) per sample
  std::vector<double> expected;   // -H(q_i), unfloored
  double mean = 0.0;              // over samples not masked out
  std::size_t counted = 0;
};

class ConditioningTrack;

// `exclude` (optional) has one flag per sample; flagged samples are left out
// of the mean. Throws Error(kAlignment) if the track has fewer rows than the
// signal has samples.
LogLikelihoodTrace LogLikelihood(const ConditionalModel& model,
                                 const PcmSignal& signal,
                                 const ConditioningTrack& track,
                                 const std::vector<bool>* exclude = nullptr);

// Trailing moving averages (window samples, shorter at the start) of the
// observed log-likelihood and of its expectation under the model. A
// sustained gap means the model does not describe the input well. No
// decision is taken on it.
struct LikelihoodComparison {
  std::vector<double> observed;
  std::vector<double> expected;
};
LikelihoodComparison CompareLikelihood(const LogLikelihoodTrace& trace,
                                       std::size_t window);

}  // namespace gvox

#endif  // GVOX_MODEL_H_
