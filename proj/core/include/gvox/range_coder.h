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

#ifndef GVOX_RANGE_CODER_H_
#define GVOX_RANGE_CODER_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gvox/model.h"

namespace gvox {

inline constexpr int kFreqBits = 16;
inline constexpr std::uint32_t kFreqTotal = 1u << kFreqBits;

// Integer frequencies summing to 2^16 with every symbol at least 1.
// cumulative[s] is the sum of the frequencies of symbols below s;
// cumulative[256] == 2^16.
class FreqTable {
 public:
  // Throws Error(kInvalidArgument) unless the frequencies are all >= 1 and
  // sum to 2^16.
  explicit FreqTable(std::span<const std::uint32_t> frequencies);

  static FreqTable Uniform();

  std::uint32_t frequency(int symbol) const {
    return cumulative_[symbol + 1] - cumulative_[symbol];
  }
  std::uint32_t cumulative(int symbol) const { return cumulative_[symbol]; }

  // Ideal code length of `symbol` in bits: -log2(f / 2^16).
  double CodeLength(int symbol) const;

 private:
  std::array<std::uint32_t, kAlphabetSize + 1> cumulative_{};
};

// Largest-remainder apportionment of 2^16 counts with a floor of one count
// per symbol. Ties in the remainder go to the lower symbol index.
FreqTable QuantizePmf(const SymbolDistribution& dist);

// Range encoder: 32-bit range, 64-bit low register with byte-wise carry
// propagation through a one-byte cache and a run of pending 0xFF bytes.
// Interval partition uses exact 64-bit products, so the only coding loss
// besides the final flush is rounding of interval bounds.
class RangeEncoder {
 public:
  void Encode(int symbol, const FreqTable& table);

  // Flushes the final 5 bytes. Throws Error(kStateError) on a second call
  // or on Encode after Finish.
  std::vector<std::uint8_t> Finish();

  std::size_t symbols() const { return symbols_; }

 private:
  void ShiftLow();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
  std::size_t symbols_ = 0;
  bool finished_ = false;
};

class RangeDecoder {
 public:
  // Consumes the first 5 bytes. Throws Error(kUnderrun) if fewer exist.
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);

  // Throws Error(kUnderrun) if the stream runs out of bytes.
  int Decode(const FreqTable& table);

  std::size_t consumed() const { return pos_; }
  std::size_t symbols() const { return symbols_; }

 private:
  std::uint8_t NextByte();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
  std::size_t symbols_ = 0;
};

}  // namespace gvox

#endif  // GVOX_RANGE_CODER_H_
