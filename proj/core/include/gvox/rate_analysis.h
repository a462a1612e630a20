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

#ifndef GVOX_RATE_ANALYSIS_H_
#define GVOX_RATE_ANALYSIS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gvox/model.h"
#include "gvox/parametric.h"

namespace gvox {

// Entropy in bits, 0 log 0 := 0. ConditionalEntropy measures the model's
// distribution before the coding floor; code lengths use the floored one.
double ConditionalEntropy(const SymbolDistribution& dist);
double EntropyBits(std::span<const double> pmf);

// Per-sample instantaneous information: h = H(q_i), r = -log2 q_i(n_i).
struct InfoTrace {
  std::vector<double> h_bits;
  std::vector<double> r_bits;
  std::vector<bool> silent;  // excluded from averages when true

  std::size_t size() const { return h_bits.size(); }
};

// Aggregate rates in bits per sample over non-silent samples.
//   h_bar: mean model entropy (the mean of InfoTrace::h_bits)
//   r:     mean ideal code length of the coded symbols
//   generation_rate: mean entropy of the distributions sampled while
//          generating (synthesis only)
struct RateReport {
  double h_bar = 0.0;
  double r = 0.0;
  std::optional<double> generation_rate;
  std::optional<double> payload_bits_per_sample;  // over all samples
  std::optional<std::uint64_t> payload_bits;
  double ideal_bits_total = 0.0;  // sum of r_bits over all samples
  std::uint64_t samples_counted = 0;
  std::uint64_t silence_excluded = 0;
  int sample_rate_hz = kWidebandRate;

  // Flat "key=value" lines; rates also per second.
  std::string ToKeyValue() const;
};

// Means of the trace over non-silent samples.
RateReport SummarizeTrace(const InfoTrace& trace, int sample_rate_hz);

// Teacher-forced trace of `model` over the mu-law symbols of `signal`.
// `silent` (optional, one flag per sample) marks excluded samples.
InfoTrace ComputeInfoTrace(const ConditionalModel& model,
                           const PcmSignal& signal,
                           const ConditioningTrack& track,
                           const std::vector<bool>* silent = nullptr);

// Same, directly on a symbol sequence with per-sample conditioning rows.
InfoTrace ComputeInfoTrace(const ConditionalModel& model,
                           std::span<const MuLawSymbol> symbols,
                           const ConditioningTrack& track,
                           const std::vector<bool>* silent = nullptr);

// CSV with header "index,h_bits,r_bits,silent_flag", 9 decimals.
void ExportTrace(const InfoTrace& trace, std::ostream& out);
void ExportTrace(const InfoTrace& trace, const std::filesystem::path& path);
InfoTrace ParseTraceCsv(std::istream& in);

// A discrete joint source over blocks of `block_length` pairs (S_i, Theta_i).
// pmf is indexed by the block (s_1..s_L, theta_1..theta_L) written in mixed
// radix: index = sum_i s_i * |S|^(i-1) + |S|^L * sum_i theta_i * |Theta|^(i-1).
struct JointBlockSource {
  int s_alphabet = 2;
  int theta_alphabet = 2;
  int block_length = 1;
  std::vector<double> pmf;
};

struct ChainRuleRates {
  double joint = 0.0;        // H(S, Theta) / L
  double conditional = 0.0;  // H(S | Theta) / L
  double theta = 0.0;        // H(Theta) / L
  double additivity_error = 0.0;  // |joint - conditional - theta|
};

inline constexpr std::size_t kMaxJointStates = 1u << 16;

// Exhaustive enumeration. H(S|Theta) is computed from the conditional
// distributions p(s | theta), not as a difference of entropies. Throws
// Error(kInvalidArgument) when the state space exceeds kMaxJointStates or the
// pmf has the wrong size.
ChainRuleRates ChainRuleCheck(const JointBlockSource& source);

}  // namespace gvox

#endif  // GVOX_RATE_ANALYSIS_H_
