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

#ifndef GVOX_PARAMETRIC_DECODER_H_
#define GVOX_PARAMETRIC_DECODER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "gvox/model.h"
#include "gvox/parametric.h"
#include "gvox/rate_analysis.h"

namespace gvox {

struct SynthesisOptions {
  std::uint64_t seed = 1;
  double temperature = 1.0;
  bool keep_trace = false;
};

// Entropies of the distributions sampled during synthesis.
struct SynthesisTrace {
  std::vector<double> h_bits;
};

// Generative decoder: draws every 16 kHz output sample from the model given
// its own previous output and the dequantized conditioning. Output length is
// frames * 320.
PcmSignal Synthesize(std::span<const std::uint8_t> bitstream,
                     const ConditionalModel& model,
                     const SynthesisOptions& options = {},
                     SynthesisTrace* trace = nullptr);

// Same, from an already-built conditioning track.
PcmSignal SynthesizeFromTrack(const ConditioningTrack& track,
                              const ConditionalModel& model,
                              const SynthesisOptions& options = {},
                              SynthesisTrace* trace = nullptr);

// Warm-up excluded from generation statistics.
inline constexpr std::size_t kWarmupSamples16k = 160;

// Mean entropy of the sampled distributions: the rate of new information
// injected by generation. Skips the warm-up and samples flagged in `silent`
// (optional, one flag per sample).
double GenerationRate(const SynthesisTrace& trace,
                      const std::vector<bool>* silent = nullptr);

// Low-complexity fallback decoder at 8 kHz: harmonics of the pitch below a
// voicing-dependent cutoff plus LPC-shaped noise above it, 10 ms subframes
// overlap-added with a periodic Hann window, each 20 ms frame scaled to its
// coded power. Output length is frames * 160.
PcmSignal RenderSinusoidal(std::span<const std::uint8_t> bitstream,
                           std::uint64_t seed = 1);
PcmSignal RenderSinusoidalFrames(std::span<const FrameParams> frames,
                                 std::uint64_t seed = 1);

// Upper edge of the harmonic band for a voicing level, in Hz at 8 kHz.
double VoicedCutoffHz(int voicing);

}  // namespace gvox

#endif  // GVOX_PARAMETRIC_DECODER_H_
