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

#ifndef GVOX_WAVEFORM_CODER_H_
#define GVOX_WAVEFORM_CODER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gvox/model.h"
#include "gvox/parametric.h"
#include "gvox/rate_analysis.h"

namespace gvox {

// Closed-loop waveform coder. Per sample i:
//   n_i  = Q(x_i)                      (G.711 mu-law, optionally coarsened)
//   q_i  = model distribution given the reconstructed past and theta_i
//   n_i is range coded under QuantizePmf(q_i)
//   the model advances with the reconstructed symbol, never with x_i
// The decoder runs the identical model trajectory, so both ends stay in
// lock step.
//
// Container (little-endian integers):
//   "GVOXWF01", u32 version, u32 sample count, u32 sample rate,
//   [version 2 only: u32 quantizer levels]
//   32-byte SHA-256 of the weights file, u32 parametric length,
//   parametric bitstream ("GVOXPC01"), u32 payload length, payload.
// Version 1 is written for the full 256-level quantizer.

inline constexpr std::uint32_t kWaveformVersion = 1;
inline constexpr std::uint32_t kWaveformVersionLevels = 2;

// Coarser quantizers keep every 2^k-th mu-law cell: levels in
// {256, 128, ..., 2}. A coarse index covers 256/levels consecutive codes and
// reconstructs at the upper-middle code of its group.
struct QuantizerSpec {
  int levels = kAlphabetSize;

  int group() const { return kAlphabetSize / levels; }
  MuLawSymbol Representative(int index) const;
  int IndexOf(MuLawSymbol code) const;
};

std::vector<double> CoarsenDistribution(const SymbolDistribution& dist,
                                        const QuantizerSpec& quantizer);

struct WaveformEncodeOptions {
  QuantizerSpec quantizer;
  // Rates exclude 20 ms frames below this level; nullopt counts everything.
  std::optional<double> silence_threshold_db;
  // Keep the per-sample trace in the result.
  bool keep_trace = false;
};

struct WaveformEncoding {
  std::vector<std::uint8_t> bytes;
  RateReport report;
  InfoTrace trace;  // filled when keep_trace
  ConditioningTrack conditioning;
};

// signal must be 16 kHz and covered by `frames` (frames * 320 >= samples).
WaveformEncoding EncodeWaveform(const PcmSignal& signal,
                                std::span<const PackedFrame> frames,
                                const ConditionalModel& model,
                                const WaveformEncodeOptions& options = {});

struct WaveformDecoding {
  PcmSignal signal;
  ConditioningTrack conditioning;
};

// Throws Error(kChecksumMismatch) before decoding if the container was made
// with a different model, Error(kUnderrun) on a truncated payload.
WaveformDecoding DecodeWaveform(std::span<const std::uint8_t> bytes,
                                const ConditionalModel& model);

// Rates only, no bitstream.
RateReport WaveformRateReport(const PcmSignal& signal,
                              std::span<const PackedFrame> frames,
                              const ConditionalModel& model,
                              const WaveformEncodeOptions& options = {});

// Per-sample mu-law transcode of a signal (through the given quantizer): the
// waveform every correct encode/decode round trip must reproduce.
PcmSignal MuLawTranscode(const PcmSignal& signal,
                         const QuantizerSpec& quantizer = {});

// Per-sample silence flags derived from 20 ms frames.
std::vector<bool> SilenceSampleMask(const PcmSignal& signal,
                                    double threshold_db);

}  // namespace gvox

#endif  // GVOX_WAVEFORM_CODER_H_
