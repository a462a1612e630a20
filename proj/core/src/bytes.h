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

// Little-endian byte helpers shared by the container formats.

#ifndef GVOX_SRC_BYTES_H_
#define GVOX_SRC_BYTES_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gvox/error.h"

namespace gvox::internal {

inline void PutU8(std::vector<std::uint8_t>* out, std::uint8_t v) {
  out->push_back(v);
}

inline void PutU16(std::vector<std::uint8_t>* out, std::uint16_t v) {
  out->push_back(static_cast<std::uint8_t>(v));
  out->push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void PutU32(std::vector<std::uint8_t>* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void PutU64(std::vector<std::uint8_t>* out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out->push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void PutF64(std::vector<std::uint8_t>* out, double v) {
  PutU64(out, std::bit_cast<std::uint64_t>(v));
}

inline void PutBytes(std::vector<std::uint8_t>* out,
                     std::span<const std::uint8_t> bytes) {
  out->insert(out->end(), bytes.begin(), bytes.end());
}

inline void PutTag(std::vector<std::uint8_t>* out, std::string_view tag) {
  out->insert(out->end(), tag.begin(), tag.end());
}

// Bounds-checked sequential reader. Reading past the end throws
// Error(truncated_code).
class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, std::string what,
             ErrorCode truncated_code = ErrorCode::kTruncated)
      : bytes_(bytes), what_(std::move(what)), code_(truncated_code) {}

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::span<const std::uint8_t> Take(std::size_t n) {
    if (remaining() < n) {
      throw Error(code_, what_ + ": need " + std::to_string(pos_ + n) +
                             " bytes, have " + std::to_string(bytes_.size()));
    }
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::uint8_t U8() { return Take(1)[0]; }
  std::uint16_t U16() {
    auto b = Take(2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }
  std::uint32_t U32() {
    auto b = Take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::uint64_t U64() {
    auto b = Take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }

  bool TagEquals(std::string_view tag) {
    auto b = Take(tag.size());
    return std::memcmp(b.data(), tag.data(), tag.size()) == 0;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::string what_;
  ErrorCode code_;
};

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes);

}  // namespace gvox::internal

#endif  // GVOX_SRC_BYTES_H_
