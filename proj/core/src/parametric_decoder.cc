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

#include "gvox/parametric_decoder.h"

#include "gvox/error.h"
#include "gvox/rng.h"

namespace gvox {

PcmSignal SynthesizeFromTrack(const ConditioningTrack& track,
                              const ConditionalModel& model,
                              const SynthesisOptions& options,
                              SynthesisTrace* trace) {
  if (track.dim() != model.conditioning_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "conditioning dim " + std::to_string(track.dim()) +
                    ", model expects " + std::to_string(model.conditioning_dim()));
  }
  if (!(options.temperature >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be non-negative");
  }
  PcmSignal out;
  out.sample_rate_hz = kWidebandRate;
  out.samples.resize(track.rows());
  if (trace != nullptr) trace->h_bits.assign(track.rows(), 0.0);
  Rng rng(options.seed);
  auto session = model.NewSession();
  for (std::size_t i = 0; i < track.rows(); ++i) {
    const SymbolDistribution q = session->NextDistribution(track.Row(i));
    const MuLawSymbol symbol = SampleSymbol(q, rng, options.temperature);
    if (trace != nullptr) trace->h_bits[i] = ConditionalEntropy(q);
    out.samples[i] = MuLawDecode(symbol);
    session->Advance(symbol);
  }
  return out;
}

PcmSignal Synthesize(std::span<const std::uint8_t> bitstream,
                     const ConditionalModel& model,
                     const SynthesisOptions& options, SynthesisTrace* trace) {
  const auto track = ConditioningFromStream(UnpackStream(bitstream), kWidebandRate);
  return SynthesizeFromTrack(track, model, options, trace);
}

double GenerationRate(const SynthesisTrace& trace, const std::vector<bool>* silent) {
  if (silent != nullptr && silent->size() != trace.h_bits.size()) {
    throw Error(ErrorCode::kAlignment, "silence mask length differs from trace");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = kWarmupSamples16k; i < trace.h_bits.size(); ++i) {
    if (silent != nullptr && (*silent)[i]) continue;
    sum += trace.h_bits[i];
    ++count;
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

}  // namespace gvox
