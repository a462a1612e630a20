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

#include "gvox/error.h"
#include "gvox/lpc.h"
#include "gvox/parametric_decoder.h"
#include "gvox/rng.h"

namespace gvox {
namespace {

constexpr int kRate = kNarrowbandRate;
constexpr int kHop = kFrameSamples8k / 2;   // 10 ms
constexpr int kGrain = 2 * kHop;            // periodic Hann, sums to one at kHop
constexpr int kNoiseWarmup = 64;
constexpr int kHighpassTaps = 31;
constexpr int kMaxHarmonics = 80;

double Hann(int n) {
  return 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / kGrain);
}

// Windowed-sinc highpass (spectral inversion of a Hamming lowpass).
std::vector<double> Highpass(double cutoff_hz) {
  const int mid = kHighpassTaps / 2;
  const double fc = cutoff_hz / kRate;
  std::vector<double> h(kHighpassTaps);
  double sum = 0.0;
  for (int n = 0; n < kHighpassTaps; ++n) {
    const int k = n - mid;
    const double sinc =
        k == 0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * k) / (std::numbers::pi * k);
    const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (kHighpassTaps - 1));
    h[n] = sinc * w;
    sum += h[n];
  }
  for (double& v : h) v = -v / sum;
  h[mid] += 1.0;
  return h;
}

// One grain of harmonic-plus-noise excitation shaped by the envelope.
std::vector<double> RenderGrain(const FrameParams& frame, const LpcCoefficients& a,
                                long start, const std::array<double, kMaxHarmonics>& phases,
                                Rng& rng) {
  std::vector<double> grain(kGrain, 0.0);
  const double cutoff = frame.voicing > 0 && frame.pitch_hz > 0.0
                            ? VoicedCutoffHz(frame.voicing)
                            : 0.0;
  if (cutoff > 0.0) {
    const double f0 = frame.pitch_hz;
    // Per-harmonic amplitude giving the same power density as the noise.
    const double scale = std::sqrt(4.0 * f0 / kRate);
    for (int k = 1; k <= kMaxHarmonics && k * f0 < cutoff; ++k) {
      const double omega = 2.0 * std::numbers::pi * k * f0 / kRate;
      const double amp = scale * EnvelopeMagnitude(a, omega);
      for (int n = 0; n < kGrain; ++n) {
        grain[n] += amp * std::cos(omega * static_cast<double>(start + n) + phases[k - 1]);
      }
    }
  }
  if (cutoff < kRate / 2.0) {
    const int total = kNoiseWarmup + kGrain + kHighpassTaps;
    std::vector<double> noise(total);
    std::array<double, kLpcOrder> past{};
    for (int n = 0; n < total; ++n) {
      double y = rng.Gaussian();
      for (int j = 1; j <= kLpcOrder; ++j) y -= a[j] * past[j - 1];
      std::copy_backward(past.begin(), past.end() - 1, past.end());
      past[0] = y;
      noise[n] = y;
    }
    std::vector<double> hp;
    if (cutoff > 0.0) hp = Highpass(cutoff);
    for (int n = 0; n < kGrain; ++n) {
      const int at = kNoiseWarmup + kHighpassTaps - 1 + n;
      double v = noise[at];
      if (!hp.empty()) {
        v = 0.0;
        for (int t = 0; t < kHighpassTaps; ++t) v += hp[t] * noise[at - t];
      }
      grain[n] += v;
    }
  }
  return grain;
}

}  // namespace

double VoicedCutoffHz(int voicing) {
  if (voicing < 0 || voicing > 3) {
    throw Error(ErrorCode::kInvalidArgument, "voicing level out of range");
  }
  return voicing / 3.0 * (kRate / 2.0);
}

PcmSignal RenderSinusoidalFrames(std::span<const FrameParams> frames,
                                 std::uint64_t seed) {
  PcmSignal out;
  out.sample_rate_hz = kRate;
  const long length = static_cast<long>(frames.size()) * kFrameSamples8k;
  if (frames.empty()) return out;
  Rng rng(seed);
  std::array<double, kMaxHarmonics> phases;
  for (double& p : phases) p = 2.0 * std::numbers::pi * rng.Uniform();

  std::vector<LpcCoefficients> lpc;
  for (const auto& f : frames) lpc.push_back(LsfToLpc(f.lsf));

  // Grain j is centred on sample j * kHop; window sums are one everywhere.
  std::vector<double> acc(length, 0.0);
  const long grains = length / kHop + 1;
  for (long j = 0; j < grains; ++j) {
    const std::size_t f =
        std::min<std::size_t>(static_cast<std::size_t>(j * kHop / kFrameSamples8k),
                              frames.size() - 1);
    const long start = j * kHop - kHop;
    const auto grain = RenderGrain(frames[f], lpc[f], start, phases, rng);
    for (int n = 0; n < kGrain; ++n) {
      const long at = start + n;
      if (at >= 0 && at < length) acc[at] += Hann(n) * grain[n];
    }
  }

  out.samples.resize(length);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const long begin = static_cast<long>(f) * kFrameSamples8k;
    double energy = 0.0;
    for (int n = 0; n < kFrameSamples8k; ++n) energy += acc[begin + n] * acc[begin + n];
    const double rms = std::sqrt(energy / kFrameSamples8k);
    const double target = 32768.0 * std::pow(10.0, frames[f].power_db / 20.0);
    const double gain = rms > 0.0 ? target / rms : 0.0;
    for (int n = 0; n < kFrameSamples8k; ++n) {
      const double v = std::round(acc[begin + n] * gain);
      out.samples[begin + n] = static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
    }
  }
  return out;
}

PcmSignal RenderSinusoidal(std::span<const std::uint8_t> bitstream, std::uint64_t seed) {
  const auto stream = UnpackStream(bitstream);
  std::vector<FrameParams> frames;
  frames.reserve(stream.frames.size());
  for (const auto& p : stream.frames) frames.push_back(DequantizeFrame(p));
  return RenderSinusoidalFrames(frames, seed);
}

}  // namespace gvox
