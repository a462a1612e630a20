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
#include <array>
#include <cmath>
#include <numbers>

#include "gvox/error.h"
#include "gvox/signal_io.h"

namespace gvox {
namespace {

constexpr int kSideTaps = 24;
constexpr double kKaiserBeta = 6.0;

// Interpolation taps for the half-sample point between x[n] and x[n+1]:
// tap k multiplies x[n - 11 + k]. Normalized to unit DC gain.
std::array<double, kSideTaps> HalfBandTaps() {
  std::array<double, kSideTaps> taps{};
  const double half_span = kSideTaps / 2.0;
  const double norm = std::cyl_bessel_i(0.0, kKaiserBeta);
  double sum = 0.0;
  for (int k = 0; k < kSideTaps; ++k) {
    const double t = k - (half_span - 0.5);
    const double sinc = std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    const double ratio = t / half_span;
    const double window =
        std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - ratio * ratio)) /
        norm;
    taps[k] = sinc * window;
    sum += taps[k];
  }
  for (double& tap : taps) tap /= sum;
  return taps;
}

const std::array<double, kSideTaps>& Taps() {
  static const auto taps = HalfBandTaps();
  return taps;
}

std::int16_t Saturate(double v) {
  const long r = std::lround(v);
  return static_cast<std::int16_t>(std::clamp<long>(r, -32768, 32767));
}

std::int16_t At(const std::vector<std::int16_t>& x, long i) {
  const long last = static_cast<long>(x.size()) - 1;
  return x[static_cast<std::size_t>(std::clamp(i, 0L, last))];
}

PcmSignal Upsample(const PcmSignal& in) {
  const auto& taps = Taps();
  const auto& x = in.samples;
  PcmSignal out;
  out.sample_rate_hz = kWidebandRate;
  out.samples.resize(2 * x.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    out.samples[2 * n] = x[n];
    double acc = 0.0;
    const long base = static_cast<long>(n) - (kSideTaps / 2 - 1);
    for (int k = 0; k < kSideTaps; ++k) acc += taps[k] * At(x, base + k);
    out.samples[2 * n + 1] = Saturate(acc);
  }
  return out;
}

PcmSignal Downsample(const PcmSignal& in) {
  const auto& taps = Taps();
  const auto& x = in.samples;
  PcmSignal out;
  out.sample_rate_hz = kNarrowbandRate;
  out.samples.resize((x.size() + 1) / 2);
  for (std::size_t n = 0; n < out.samples.size(); ++n) {
    const long center = static_cast<long>(2 * n);
    double acc = 0.5 * x[2 * n];
    for (int k = 0; k < kSideTaps; ++k) {
      acc += 0.5 * taps[k] * At(x, center + 2 * k - (kSideTaps - 1));
    }
    out.samples[n] = Saturate(acc);
  }
  return out;
}

}  // namespace

PcmSignal Resample(const PcmSignal& signal, int target_rate_hz) {
  if (signal.sample_rate_hz == kNarrowbandRate &&
      target_rate_hz == kWidebandRate) {
    return Upsample(signal);
  }
  if (signal.sample_rate_hz == kWidebandRate &&
      target_rate_hz == kNarrowbandRate) {
    return Downsample(signal);
  }
  throw Error(ErrorCode::kUnsupportedRate,
              "resample " + std::to_string(signal.sample_rate_hz) + " -> " +
                  std::to_string(target_rate_hz) + " Hz");
}

}  // namespace gvox
