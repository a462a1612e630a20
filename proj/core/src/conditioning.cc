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

#include "gvox/error.h"
#include "gvox/parametric.h"

namespace gvox {

ConditioningTrack::ConditioningTrack(int dim, std::size_t rows)
    : dim_(dim), rows_(rows), values_(static_cast<std::size_t>(dim) * rows, 0.0) {}

std::span<const double> ConditioningTrack::Row(std::size_t i) const {
  return std::span<const double>(values_).subspan(i * dim_, dim_);
}

std::span<double> ConditioningTrack::MutableRow(std::size_t i) {
  return std::span<double>(values_).subspan(i * dim_, dim_);
}

std::array<double, kConditioningDim> ConditioningVector(const FrameParams& params) {
  std::array<double, kConditioningDim> v{};
  for (int k = 0; k < kLpcOrder; ++k) v[k] = params.lsf[k];
  v[10] = params.pitch_hz > 0.0 ? std::log(params.pitch_hz) : 0.0;
  v[11] = params.power_db;
  v[12 + std::clamp(params.voicing, 0, kVoicingLevels - 1)] = 1.0;
  return v;
}

ConditioningTrack BuildConditioning(std::span<const FrameParams> frames,
                                    int output_rate_hz) {
  if (!IsSupportedRate(output_rate_hz)) {
    throw Error(ErrorCode::kUnsupportedRate,
                "conditioning at " + std::to_string(output_rate_hz) + " Hz");
  }
  const std::size_t hold = static_cast<std::size_t>(output_rate_hz) / 100;
  ConditioningTrack track(kConditioningDim, frames.size() * 2 * hold);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto current = ConditioningVector(frames[f]);
    const auto next =
        ConditioningVector(frames[f + 1 < frames.size() ? f + 1 : f]);
    std::array<double, kConditioningDim> mid{};
    for (int d = 0; d < kConditioningDim; ++d) mid[d] = 0.5 * (current[d] + next[d]);
    for (std::size_t i = 0; i < hold; ++i) {
      auto a = track.MutableRow(2 * f * hold + i);
      auto b = track.MutableRow((2 * f + 1) * hold + i);
      std::copy(current.begin(), current.end(), a.begin());
      std::copy(mid.begin(), mid.end(), b.begin());
    }
  }
  return track;
}

ConditioningTrack ConditioningFromStream(const ParametricStream& stream,
                                         int output_rate_hz) {
  std::vector<FrameParams> params;
  params.reserve(stream.frames.size());
  for (const auto& f : stream.frames) params.push_back(DequantizeFrame(f));
  return BuildConditioning(params, output_rate_hz);
}

}  // namespace gvox
