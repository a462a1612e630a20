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
#include <bit>

#include "gvox/signal_io.h"

namespace gvox {
namespace {

constexpr int kBias = 0x84;     // 33 in the 14-bit domain
constexpr int kClip = 32635;    // 0x7FFF - kBias

constexpr int Segment(int magnitude) {
  const int biased = std::min(magnitude, kClip) + kBias;
  return std::bit_width(static_cast<unsigned>(biased >> 8));
}

constexpr std::array<std::int16_t, kAlphabetSize> BuildDecodeTable() {
  std::array<std::int16_t, kAlphabetSize> table{};
  for (int code = 0; code < kAlphabetSize; ++code) {
    const int inverted = ~code & 0xFF;
    const int exponent = (inverted >> 4) & 0x07;
    const int mantissa = inverted & 0x0F;
    const int step = 8 << exponent;
    const int level = (128 << exponent) + step * mantissa + step / 2 - kBias;
    table[code] = static_cast<std::int16_t>(code & 0x80 ? level : -level);
  }
  return table;
}

constexpr auto kDecodeTable = BuildDecodeTable();

}  // namespace

MuLawSymbol MuLawEncode(std::int16_t sample) {
  // One's complement magnitude for negatives (so -32768 maps to 32767).
  const int magnitude = sample < 0 ? ~static_cast<int>(sample) : sample;
  const int biased = std::min(magnitude, kClip) + kBias;
  const int exponent = std::bit_width(static_cast<unsigned>(biased >> 8));
  const int mantissa = (biased >> (exponent + 3)) & 0x0F;
  const int mask = sample < 0 ? 0x7F : 0xFF;
  return static_cast<MuLawSymbol>(((exponent << 4) | mantissa) ^ mask);
}

std::int16_t MuLawDecode(MuLawSymbol symbol) { return kDecodeTable[symbol]; }

std::vector<MuLawSymbol> MuLawEncode(std::span<const std::int16_t> samples) {
  std::vector<MuLawSymbol> out(samples.size());
  std::transform(samples.begin(), samples.end(), out.begin(),
                 [](std::int16_t s) { return MuLawEncode(s); });
  return out;
}

std::vector<std::int16_t> MuLawDecode(std::span<const MuLawSymbol> symbols) {
  std::vector<std::int16_t> out(symbols.size());
  std::transform(symbols.begin(), symbols.end(), out.begin(),
                 [](MuLawSymbol s) { return MuLawDecode(s); });
  return out;
}

int MuLawStepAt(std::int16_t sample) {
  const int magnitude = sample < 0 ? ~static_cast<int>(sample) : sample;
  return 8 << Segment(magnitude);
}

}  // namespace gvox
