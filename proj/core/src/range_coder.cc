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

#include "gvox/range_coder.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gvox/error.h"

namespace gvox {
namespace {

constexpr std::uint32_t kTop = 1u << 24;

}  // namespace

FreqTable::FreqTable(std::span<const std::uint32_t> frequencies) {
  if (frequencies.size() != kAlphabetSize) {
    throw Error(ErrorCode::kInvalidArgument,
                "frequency table needs 256 entries, got " +
                    std::to_string(frequencies.size()));
  }
  std::uint64_t sum = 0;
  for (int s = 0; s < kAlphabetSize; ++s) {
    if (frequencies[s] == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "symbol " + std::to_string(s) + " has zero frequency");
    }
    cumulative_[s] = static_cast<std::uint32_t>(sum);
    sum += frequencies[s];
    if (sum > kFreqTotal) break;
  }
  if (sum != kFreqTotal) {
    throw Error(ErrorCode::kInvalidArgument,
                "frequencies must sum to 65536, got " + std::to_string(sum));
  }
  cumulative_[kAlphabetSize] = kFreqTotal;
}

FreqTable FreqTable::Uniform() {
  std::array<std::uint32_t, kAlphabetSize> f;
  f.fill(kFreqTotal / kAlphabetSize);
  return FreqTable(f);
}

double FreqTable::CodeLength(int symbol) const {
  return kFreqBits - std::log2(static_cast<double>(frequency(symbol)));
}

FreqTable QuantizePmf(const SymbolDistribution& dist) {
  const auto& p = dist.probs();
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  std::array<std::uint32_t, kAlphabetSize> f;
  std::array<double, kAlphabetSize> remainder;
  std::int64_t assigned = 0;
  for (int s = 0; s < kAlphabetSize; ++s) {
    const double share = p[s] / total * kFreqTotal;
    f[s] = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(share));
    remainder[s] = share - f[s];
    assigned += f[s];
  }
  std::array<int, kAlphabetSize> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t i = 0; assigned < kFreqTotal; ++i) {
    ++f[order[i % kAlphabetSize]];
    ++assigned;
  }
  // Symbols lifted to the floor can over-assign; take the excess back from
  // the most over-served symbols that stay at or above one count.
  for (std::size_t j = kAlphabetSize; assigned > kFreqTotal;) {
    if (j == 0) j = kAlphabetSize;
    const int s = order[--j];
    if (f[s] > 1) {
      --f[s];
      --assigned;
    }
  }
  return FreqTable(f);
}

void RangeEncoder::ShiftLow() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t byte = cache_;
    do {
      out_.push_back(static_cast<std::uint8_t>(byte + carry));
      byte = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::Encode(int symbol, const FreqTable& table) {
  if (finished_) throw Error(ErrorCode::kStateError, "encode after finish");
  if (symbol < 0 || symbol >= kAlphabetSize) {
    throw Error(ErrorCode::kInvalidArgument, "symbol out of range");
  }
  const std::uint64_t r = range_;
  const std::uint64_t a = (r * table.cumulative(symbol)) >> kFreqBits;
  const std::uint64_t b = (r * table.cumulative(symbol + 1)) >> kFreqBits;
  low_ += a;
  range_ = static_cast<std::uint32_t>(b - a);
  while (range_ < kTop) {
    range_ <<= 8;
    ShiftLow();
  }
  ++symbols_;
}

std::vector<std::uint8_t> RangeEncoder::Finish() {
  if (finished_) throw Error(ErrorCode::kStateError, "encoder already finished");
  finished_ = true;
  for (int i = 0; i < 5; ++i) ShiftLow();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes) : bytes_(bytes) {
  if (bytes.size() < 5) {
    throw Error(ErrorCode::kUnderrun,
                "range-coded payload needs at least 5 bytes, got " +
                    std::to_string(bytes.size()));
  }
  for (int i = 0; i < 5; ++i) code_ = (code_ << 8) | NextByte();
}

std::uint8_t RangeDecoder::NextByte() {
  if (pos_ >= bytes_.size()) {
    throw Error(ErrorCode::kUnderrun,
                "range-coded payload exhausted after " +
                    std::to_string(symbols_) + " symbols");
  }
  return bytes_[pos_++];
}

int RangeDecoder::Decode(const FreqTable& table) {
  const std::uint64_t r = range_;
  auto bound = [&](int s) { return (r * table.cumulative(s)) >> kFreqBits; };
  // Largest s with bound(s) <= code.
  int lo = 0, hi = kAlphabetSize;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (bound(mid) <= code_) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const std::uint64_t a = bound(lo);
  const std::uint64_t b = bound(lo + 1);
  code_ -= static_cast<std::uint32_t>(a);
  range_ = static_cast<std::uint32_t>(b - a);
  while (range_ < kTop) {
    range_ <<= 8;
    code_ = (code_ << 8) | NextByte();
  }
  ++symbols_;
  return lo;
}

}  // namespace gvox
