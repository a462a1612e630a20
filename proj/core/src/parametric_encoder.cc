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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "gvox/error.h"
#include "gvox/lpc.h"
#include "gvox/parametric.h"

namespace gvox {
namespace {

constexpr int kAnalysisWindow = 200;
constexpr int kMinLag = 20;
constexpr int kMaxLag = 160;
constexpr double kLagWindowHz = 40.0;
constexpr double kWhiteNoiseCorrection = 1.0001;
constexpr double kOctaveTolerance = 0.9;
constexpr double kStrongVoicing = 0.8;
constexpr double kWeakVoicing = 0.6;
constexpr int kSplitTaps = 31;

// Per-coefficient quantizer ranges in Hz at 8 kHz. The upper edges grow by
// far more than the minimum separation so the ordered quantizer below can
// always find a cell.
constexpr std::array<double, kLpcOrder> kLsfLowHz = {
    60, 150, 300, 500, 800, 1000, 1300, 1700, 2100, 2500};
constexpr std::array<double, kLpcOrder> kLsfHighHz = {
    700, 1100, 1500, 1900, 2300, 2600, 2900, 3200, 3500, 3850};

double HzToRad(double hz) { return 2.0 * std::numbers::pi * hz / kNarrowbandRate; }

double LsfLow(int k) { return HzToRad(kLsfLowHz[k]); }
int LsfCells(int k) { return 1 << kLsfBits[k]; }

constexpr int kPitchCells = 1 << kPitchBits;
constexpr int kPowerCells = 1 << kPowerBits;

// Lowpass at 2 kHz (Hamming-windowed sinc) splitting the 0-4 kHz band in two
// for the voicing decision.
const std::array<double, kSplitTaps>& SplitFilter() {
  static const auto taps = [] {
    std::array<double, kSplitTaps> h{};
    const int mid = kSplitTaps / 2;
    double sum = 0.0;
    for (int n = 0; n < kSplitTaps; ++n) {
      const int t = n - mid;
      const double sinc =
          t == 0 ? 0.5 : std::sin(std::numbers::pi * t / 2.0) / (std::numbers::pi * t);
      const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (kSplitTaps - 1));
      h[n] = sinc * w;
      sum += h[n];
    }
    for (double& v : h) v /= sum;
    return h;
  }();
  return taps;
}

std::vector<double> Lowpass(const std::vector<double>& x) {
  const auto& h = SplitFilter();
  const int mid = kSplitTaps / 2;
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    for (int k = 0; k < kSplitTaps; ++k) {
      const long i = static_cast<long>(n) + k - mid;
      if (i >= 0 && i < static_cast<long>(x.size())) acc += h[k] * x[i];
    }
    y[n] = acc;
  }
  return y;
}

// Normalized correlation between the frame (last kFrameSamples8k samples of
// x) and its copy delayed by `lag`.
double NormalizedCorrelation(const std::vector<double>& x, int lag) {
  const std::size_t begin = x.size() - kFrameSamples8k;
  double xy = 0.0, xx = 0.0, yy = 0.0;
  for (std::size_t n = begin; n < x.size(); ++n) {
    xy += x[n] * x[n - lag];
    xx += x[n] * x[n];
    yy += x[n - lag] * x[n - lag];
  }
  const double denom = std::sqrt(xx * yy);
  return denom > 0.0 ? xy / denom : 0.0;
}

double VoicingScore(double correlation) {
  if (correlation >= kStrongVoicing) return 1.0;
  if (correlation >= kWeakVoicing) return 0.5;
  return 0.0;
}

double BestCorrelationNear(const std::vector<double>& x, int lag) {
  double best = -1.0;
  for (int l = std::max(kMinLag, lag - 1); l <= std::min(kMaxLag, lag + 1); ++l) {
    best = std::max(best, NormalizedCorrelation(x, l));
  }
  return best;
}

LineSpectralFrequencies EstimateLsf(const std::vector<double>& buffer) {
  std::vector<double> windowed(kAnalysisWindow);
  const std::size_t begin = buffer.size() - kAnalysisWindow;
  for (int n = 0; n < kAnalysisWindow; ++n) {
    const double w =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (kAnalysisWindow - 1));
    windowed[n] = w * buffer[begin + n];
  }
  auto r = Autocorrelation(windowed, kLpcOrder);
  r[0] *= kWhiteNoiseCorrection;
  for (int k = 1; k <= kLpcOrder; ++k) {
    const double x = 2.0 * std::numbers::pi * kLagWindowHz * k / kNarrowbandRate;
    r[k] *= std::exp(-0.5 * x * x);
  }
  LpcCoefficients a;
  LineSpectralFrequencies lsf = FlatLsf();
  if (LevinsonDurbin(r, &a)) {
    if (!LpcToLsf(a, &lsf)) lsf = FlatLsf();
  }
  RepairLsf(&lsf);
  return lsf;
}

}  // namespace

FrameParams AnalyzeFrame(std::span<const std::int16_t> frame,
                         std::span<const std::int16_t> history) {
  if (frame.size() != kFrameSamples8k) {
    throw Error(ErrorCode::kInvalidArgument,
                "analysis frame must have 160 samples, got " +
                    std::to_string(frame.size()));
  }
  std::vector<double> buffer(kAnalysisHistory + kFrameSamples8k, 0.0);
  const std::size_t hist = std::min<std::size_t>(history.size(), kAnalysisHistory);
  for (std::size_t i = 0; i < hist; ++i) {
    buffer[kAnalysisHistory - hist + i] = history[history.size() - hist + i];
  }
  for (int i = 0; i < kFrameSamples8k; ++i) buffer[kAnalysisHistory + i] = frame[i];

  FrameParams params;
  const double power = RmsDbfs(frame);
  if (!std::isfinite(power)) return params;  // floor power, unvoiced, flat
  params.power_db = std::max(power, kMinPowerDb);
  params.lsf = EstimateLsf(buffer);

  // Pitch: normalized autocorrelation peak, preferring the shortest lag
  // whose peak is within kOctaveTolerance of the best (avoids picking a
  // multiple of the period).
  std::array<double, kMaxLag + 2> corr{};
  double best = -1.0;
  for (int lag = kMinLag; lag <= kMaxLag; ++lag) {
    corr[lag] = NormalizedCorrelation(buffer, lag);
    best = std::max(best, corr[lag]);
  }
  int lag = kMinLag;
  for (int l = kMinLag; l <= kMaxLag; ++l) {
    const bool peak = (l == kMinLag || corr[l] >= corr[l - 1]) &&
                      (l == kMaxLag || corr[l] >= corr[l + 1]);
    if (peak && corr[l] >= kOctaveTolerance * best) {
      lag = l;
      break;
    }
  }
  double fractional = lag;
  if (lag > kMinLag && lag < kMaxLag) {
    const double c0 = corr[lag - 1], c1 = corr[lag], c2 = corr[lag + 1];
    const double denom = c0 - 2.0 * c1 + c2;
    if (denom < 0.0) fractional += std::clamp(0.5 * (c0 - c2) / denom, -0.5, 0.5);
  }

  const auto low = Lowpass(buffer);
  std::vector<double> high(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) high[i] = buffer[i] - low[i];
  const double score = 0.5 * (VoicingScore(BestCorrelationNear(low, lag)) +
                              VoicingScore(BestCorrelationNear(high, lag)));
  params.voicing = static_cast<int>(std::lround(3.0 * score));
  params.pitch_hz = params.voicing == 0
                        ? kUnvoicedPitch
                        : std::clamp(kNarrowbandRate / fractional, kMinPitchHz,
                                     kMaxPitchHz);
  return params;
}

double LsfStep(int k) {
  return (HzToRad(kLsfHighHz[k]) - LsfLow(k)) / LsfCells(k);
}

double LsfLevel(int k, int index) { return LsfLow(k) + (index + 0.5) * LsfStep(k); }

double PitchLevel(int index) {
  return kMinPitchHz *
         std::pow(kMaxPitchHz / kMinPitchHz,
                  static_cast<double>(index) / (kPitchCells - 1));
}

double PowerStep() { return (kMaxPowerDb - kMinPowerDb) / kPowerCells; }

double PowerLevel(int index) { return kMinPowerDb + (index + 0.5) * PowerStep(); }

void RepairLsf(LineSpectralFrequencies* lsf, double delta) {
  auto& f = *lsf;
  const auto flat = FlatLsf();
  for (int k = 0; k < kLpcOrder; ++k) {
    if (!std::isfinite(f[k])) f[k] = flat[k];
  }
  f[0] = std::max(f[0], delta);
  for (int k = 1; k < kLpcOrder; ++k) f[k] = std::max(f[k], f[k - 1] + delta);
  f[kLpcOrder - 1] = std::min(f[kLpcOrder - 1], std::numbers::pi - delta);
  for (int k = kLpcOrder - 2; k >= 0; --k) f[k] = std::min(f[k], f[k + 1] - delta);
}

QuantizerIndices QuantizeParams(const FrameParams& params, EncoderStats* stats) {
  QuantizerIndices idx;
  bool clamped_lsf = false;
  double previous = 0.0;
  for (int k = 0; k < kLpcOrder; ++k) {
    const int cells = LsfCells(k);
    const double pos = (params.lsf[k] - LsfLow(k)) / LsfStep(k);
    int i = static_cast<int>(std::floor(pos));
    if (!(pos >= 0.0) || i >= cells) clamped_lsf = true;
    i = std::clamp(i, 0, cells - 1);
    // Keep reconstruction levels ordered so decoded LSFs need no repair.
    if (k > 0) {
      while (i < cells - 1 && LsfLevel(k, i) <= previous + kMinLsfSeparation) ++i;
    }
    idx.lsf[k] = i;
    previous = LsfLevel(k, i);
  }

  idx.voicing = std::clamp(params.voicing, 0, kVoicingLevels - 1);
  bool clamped_pitch = false;
  if (idx.voicing > 0) {
    const double pos = (kPitchCells - 1) * std::log(params.pitch_hz / kMinPitchHz) /
                       std::log(kMaxPitchHz / kMinPitchHz);
    const long i = std::isfinite(pos) ? std::lround(pos) : 0;
    clamped_pitch = !std::isfinite(pos) || i < 0 || i > kPitchCells - 1;
    idx.pitch = static_cast<int>(std::clamp<long>(i, 0, kPitchCells - 1));
  }

  const double ppos = (params.power_db - kMinPowerDb) / PowerStep();
  int pi = std::isfinite(ppos) ? static_cast<int>(std::floor(ppos)) : 0;
  const bool clamped_power = !(ppos >= 0.0) || pi >= kPowerCells;
  idx.power = std::clamp(pi, 0, kPowerCells - 1);

  if (stats) {
    ++stats->frames;
    stats->clamped_lsf += clamped_lsf;
    stats->clamped_pitch += clamped_pitch;
    stats->clamped_power += clamped_power;
  }
  return idx;
}

FrameParams DequantizeIndices(const QuantizerIndices& idx) {
  FrameParams params;
  for (int k = 0; k < kLpcOrder; ++k) params.lsf[k] = LsfLevel(k, idx.lsf[k]);
  RepairLsf(&params.lsf);
  params.voicing = idx.voicing;
  params.pitch_hz = idx.voicing == 0 ? kUnvoicedPitch : PitchLevel(idx.pitch);
  params.power_db = PowerLevel(idx.power);
  return params;
}

PackedFrame QuantizeFrame(const FrameParams& params, EncoderStats* stats) {
  return PackIndices(QuantizeParams(params, stats));
}

FrameParams DequantizeFrame(PackedFrame packed) {
  return DequantizeIndices(UnpackIndices(packed));
}

PackedFrame PackIndices(const QuantizerIndices& idx) {
  std::uint64_t bits = 0;
  auto put = [&bits](int value, int width) {
    bits = (bits << width) | (static_cast<std::uint64_t>(value) & ((1u << width) - 1));
  };
  for (int k = 0; k < kLpcOrder; ++k) put(idx.lsf[k], kLsfBits[k]);
  put(idx.pitch, kPitchBits);
  put(idx.power, kPowerBits);
  put(idx.voicing, kVoicingBits);
  return PackedFrame{bits};
}

QuantizerIndices UnpackIndices(PackedFrame frame) {
  QuantizerIndices idx;
  int shift = kFrameBits;
  auto get = [&](int width) {
    shift -= width;
    return static_cast<int>((frame.bits >> shift) & ((1u << width) - 1));
  };
  for (int k = 0; k < kLpcOrder; ++k) idx.lsf[k] = get(kLsfBits[k]);
  idx.pitch = get(kPitchBits);
  idx.power = get(kPowerBits);
  idx.voicing = get(kVoicingBits);
  return idx;
}

std::size_t FramesForSamples(std::size_t samples, int sample_rate_hz) {
  const std::size_t frame = static_cast<std::size_t>(sample_rate_hz) / 50;
  return (samples + frame - 1) / frame;
}

std::vector<PackedFrame> EncodeParametric(const PcmSignal& signal,
                                          EncoderStats* stats) {
  if (!IsSupportedRate(signal.sample_rate_hz)) {
    throw Error(ErrorCode::kUnsupportedRate,
                std::to_string(signal.sample_rate_hz) + " Hz");
  }
  const std::size_t frames = FramesForSamples(signal.size(), signal.sample_rate_hz);
  PcmSignal narrow = signal.sample_rate_hz == kNarrowbandRate
                         ? signal
                         : Resample(signal, kNarrowbandRate);
  narrow.samples.resize(frames * kFrameSamples8k, 0);
  std::span<const std::int16_t> x(narrow.samples);
  std::vector<PackedFrame> out;
  out.reserve(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * kFrameSamples8k;
    const std::size_t hist = std::min<std::size_t>(start, kAnalysisHistory);
    const auto params = AnalyzeFrame(x.subspan(start, kFrameSamples8k),
                                     x.subspan(start - hist, hist));
    out.push_back(QuantizeFrame(params, stats));
  }
  return out;
}

}  // namespace gvox
