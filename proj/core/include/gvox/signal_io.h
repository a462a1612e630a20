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

#ifndef GVOX_SIGNAL_IO_H_
#define GVOX_SIGNAL_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gvox {

inline constexpr int kNarrowbandRate = 8000;
inline constexpr int kWidebandRate = 16000;

bool IsSupportedRate(int sample_rate_hz);

// Mono 16-bit linear PCM at 8 or 16 kHz.
struct PcmSignal {
  std::vector<std::int16_t> samples;
  int sample_rate_hz = kWidebandRate;

  std::size_t size() const { return samples.size(); }
  bool operator==(const PcmSignal&) const = default;
};

// RIFF/WAVE container, 16-bit PCM mono only. Unknown chunks are skipped.
PcmSignal ParseWav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> SerializeWav(const PcmSignal& signal);
PcmSignal ReadWav(const std::filesystem::path& path);
void WriteWav(const PcmSignal& signal, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// G.711 mu-law.
//
// The encoder is the segment construction of ITU-T G.711 (bias 33 in the
// 14-bit domain, eight segments, complemented output); negative inputs use
// one's complement magnitude as in the ITU-T G.191 reference code, so -1
// encodes to 0x7F and 0 encodes to 0xFF.
//
// The decoder is the G.191 expansion table for all 256 codes. In that table
// code 0x7F (the cell [-4, -1]) expands to 0, the same level as 0xFF, so
// MuLawEncode(MuLawDecode(c)) == c holds for every code except 0x7F, which
// maps back to 0xFF. Nothing in the coders re-encodes decoded samples, so
// the collision never reaches a bitstream.
// ---------------------------------------------------------------------------

using MuLawSymbol = std::uint8_t;

inline constexpr int kAlphabetSize = 256;
inline constexpr MuLawSymbol kMuLawZero = 0xFF;

MuLawSymbol MuLawEncode(std::int16_t sample);
std::int16_t MuLawDecode(MuLawSymbol symbol);

std::vector<MuLawSymbol> MuLawEncode(std::span<const std::int16_t> samples);
std::vector<std::int16_t> MuLawDecode(std::span<const MuLawSymbol> symbols);

// Largest |MuLawDecode(MuLawEncode(x)) - x| inside the segment containing x.
int MuLawStepAt(std::int16_t sample);

// Factor-two resampling between 8 and 16 kHz with a linear-phase half-band
// windowed-sinc filter (24 side taps, Kaiser window). Upsampling keeps the
// original samples at even output positions. Output length is 2*n for
// 8k->16k and ceil(n/2) for 16k->8k. Signal edges are extended by
// replication so constant signals stay constant.
PcmSignal Resample(const PcmSignal& signal, int target_rate_hz);

// Frame RMS in dBFS (full scale = 32768). Returns -infinity for silence.
double RmsDbfs(std::span<const std::int16_t> samples);

// One flag per frame (the last frame may be partial): true iff the frame RMS
// is below threshold_db.
std::vector<bool> DetectSilence(const PcmSignal& signal, int frame_ms = 20,
                                double threshold_db = -40.0);

// Expands a per-frame mask to one flag per sample.
std::vector<bool> ExpandFrameMask(const std::vector<bool>& frame_mask,
                                  std::size_t frame_length,
                                  std::size_t sample_count);

}  // namespace gvox

#endif  // GVOX_SIGNAL_IO_H_
