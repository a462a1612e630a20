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
#include <limits>

#include "gvox/error.h"
#include "gvox/signal_io.h"

namespace gvox {

double RmsDbfs(std::span<const std::int16_t> samples) {
  if (samples.empty()) return -std::numeric_limits<double>::infinity();
  double energy = 0.0;
  for (std::int16_t s : samples) energy += static_cast<double>(s) * s;
  const double rms = std::sqrt(energy / static_cast<double>(samples.size()));
  if (rms == 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(rms / 32768.0);
}

std::vector<bool> DetectSilence(const PcmSignal& signal, int frame_ms,
                                double threshold_db) {
  if (frame_ms <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "frame_ms must be positive");
  }
  const std::size_t frame =
      static_cast<std::size_t>(signal.sample_rate_hz) * frame_ms / 1000;
  if (frame == 0) throw Error(ErrorCode::kInvalidArgument, "frame too short");
  const std::size_t count = (signal.size() + frame - 1) / frame;
  std::vector<bool> mask(count);
  std::span<const std::int16_t> all(signal.samples);
  for (std::size_t f = 0; f < count; ++f) {
    const std::size_t begin = f * frame;
    const std::size_t len = std::min(frame, signal.size() - begin);
    mask[f] = RmsDbfs(all.subspan(begin, len)) < threshold_db;
  }
  return mask;
}

std::vector<bool> ExpandFrameMask(const std::vector<bool>& frame_mask,
                                  std::size_t frame_length,
                                  std::size_t sample_count) {
  std::vector<bool> out(sample_count, false);
  for (std::size_t i = 0; i < sample_count; ++i) {
    const std::size_t f = i / frame_length;
    out[i] = f < frame_mask.size() && frame_mask[f];
  }
  return out;
}

}  // namespace gvox
