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

#ifndef GVOX_PARAMETRIC_H_
#define GVOX_PARAMETRIC_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gvox/lpc.h"
#include "gvox/signal_io.h"

namespace gvox {

// 20 ms frames analysed at 8 kHz; 50 bits each (2500 b/s payload).
inline constexpr int kFrameSamples8k = 160;
inline constexpr int kFrameSamples16k = 320;
inline constexpr int kFrameBits = 50;
inline constexpr int kLsfTotalBits = 36;
inline constexpr int kPitchBits = 7;
inline constexpr int kPowerBits = 5;
inline constexpr int kVoicingBits = 2;
inline constexpr std::array<int, kLpcOrder> kLsfBits = {4, 4, 4, 4, 4,
                                                        4, 3, 3, 3, 3};

inline constexpr double kMinPitchHz = 50.0;
inline constexpr double kMaxPitchHz = 400.0;
inline constexpr double kUnvoicedPitch = 0.0;
inline constexpr double kMinPowerDb = -60.0;
inline constexpr double kMaxPowerDb = 0.0;
inline constexpr double kMinLsfSeparation = 0.008;
inline constexpr int kVoicingLevels = 4;

// Samples of left context AnalyzeFrame uses: pitch lags up to 160 and the
// 200-sample LPC window ending at the frame end.
inline constexpr int kAnalysisHistory = 160;

struct FrameParams {
  LineSpectralFrequencies lsf = FlatLsf();
  double pitch_hz = kUnvoicedPitch;  // kUnvoicedPitch iff voicing == 0
  double power_db = kMinPowerDb;
  int voicing = 0;  // 0 = unvoiced ... 3 = fully voiced
};

struct QuantizerIndices {
  std::array<int, kLpcOrder> lsf{};
  int pitch = 0;
  int power = 0;
  int voicing = 0;

  bool operator==(const QuantizerIndices&) const = default;
};

// The 50 frame bits in the low bits of `bits`, first field most significant:
// LSF 1..10, pitch, power, voicing.
struct PackedFrame {
  std::uint64_t bits = 0;

  bool operator==(const PackedFrame&) const = default;
};

PackedFrame PackIndices(const QuantizerIndices& indices);
QuantizerIndices UnpackIndices(PackedFrame frame);

// Counts of parameters that fell outside their quantizer range and were
// clamped.
struct EncoderStats {
  int frames = 0;
  int clamped_lsf = 0;
  int clamped_pitch = 0;
  int clamped_power = 0;
};

// frame: exactly kFrameSamples8k samples at 8 kHz. history: samples that
// precede the frame (only the last kAnalysisHistory are used; missing
// context is treated as zeros).
FrameParams AnalyzeFrame(std::span<const std::int16_t> frame,
                         std::span<const std::int16_t> history);

QuantizerIndices QuantizeParams(const FrameParams& params,
                                EncoderStats* stats = nullptr);
FrameParams DequantizeIndices(const QuantizerIndices& indices);

PackedFrame QuantizeFrame(const FrameParams& params,
                          EncoderStats* stats = nullptr);
FrameParams DequantizeFrame(PackedFrame packed);

// Reconstruction level of every LSF cell, for tests and tools.
double LsfLevel(int coefficient, int index);
double LsfStep(int coefficient);
double PitchLevel(int index);
double PowerLevel(int index);
double PowerStep();

// Forces strictly increasing LSFs in [delta, pi - delta] with at least
// `delta` between neighbours.
void RepairLsf(LineSpectralFrequencies* lsf, double delta = kMinLsfSeparation);

// Whole-signal encoder: resamples to 8 kHz if needed, zero-pads to a whole
// number of frames and analyses/quantizes every frame.
std::vector<PackedFrame> EncodeParametric(const PcmSignal& signal,
                                          EncoderStats* stats = nullptr);

// Number of frames covering `samples` at `sample_rate_hz`.
std::size_t FramesForSamples(std::size_t samples, int sample_rate_hz);

// ---------------------------------------------------------------------------
// Bitstream: "GVOXPC01", u32 frame count (little-endian), u8 mode,
// u8 conditioning-layout version, then the 50-bit frames MSB-first, zero
// padded to a byte boundary at the end.
// ---------------------------------------------------------------------------

inline constexpr std::size_t kParametricHeaderBytes = 14;
inline constexpr std::uint8_t kParametricMode = 0;
inline constexpr std::uint8_t kConditioningLayoutVersion = 1;

struct ParametricStream {
  std::uint8_t mode = kParametricMode;
  std::uint8_t layout_version = kConditioningLayoutVersion;
  std::vector<PackedFrame> frames;
};

std::vector<std::uint8_t> PackStream(std::span<const PackedFrame> frames,
                                     std::uint8_t mode = kParametricMode);
ParametricStream UnpackStream(std::span<const std::uint8_t> bytes);

// ---------------------------------------------------------------------------
// Conditioning track: one 16-dim vector per 10 ms, held for every output
// sample of its interval. Layout (version 1):
//   [0..9]   LSFs in radians
//   [10]     ln(pitch_hz), 0 when unvoiced
//   [11]     power in dB
//   [12..15] one-hot voicing level
// The second vector of each frame is the midpoint between the frame and the
// next one (the last frame is repeated); the one-hot part is averaged too.
// ---------------------------------------------------------------------------

inline constexpr int kConditioningDim = 16;

class ConditioningTrack {
 public:
  ConditioningTrack() = default;
  ConditioningTrack(int dim, std::size_t rows);

  int dim() const { return dim_; }
  std::size_t rows() const { return rows_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> Row(std::size_t i) const;
  std::span<double> MutableRow(std::size_t i);
  const std::vector<double>& values() const { return values_; }

  bool operator==(const ConditioningTrack&) const = default;

 private:
  int dim_ = kConditioningDim;
  std::size_t rows_ = 0;
  std::vector<double> values_;
};

std::array<double, kConditioningDim> ConditioningVector(
    const FrameParams& params);

ConditioningTrack BuildConditioning(std::span<const FrameParams> frames,
                                    int output_rate_hz);

// Unpacks, dequantizes and builds the track in one go.
ConditioningTrack ConditioningFromStream(const ParametricStream& stream,
                                         int output_rate_hz);

}  // namespace gvox

#endif  // GVOX_PARAMETRIC_H_
