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
#include <string_view>

#include "bytes.h"
#include "gvox/error.h"
#include "gvox/parametric.h"

namespace gvox {
namespace {

constexpr std::string_view kMagic = "GVOXPC01";

std::size_t PayloadBytes(std::size_t frames) {
  return (frames * kFrameBits + 7) / 8;
}

}  // namespace

std::vector<std::uint8_t> PackStream(std::span<const PackedFrame> frames,
                                     std::uint8_t mode) {
  std::vector<std::uint8_t> out;
  out.reserve(kParametricHeaderBytes + PayloadBytes(frames.size()));
  internal::PutTag(&out, kMagic);
  internal::PutU32(&out, static_cast<std::uint32_t>(frames.size()));
  internal::PutU8(&out, mode);
  internal::PutU8(&out, kConditioningLayoutVersion);

  std::uint64_t acc = 0;
  int pending = 0;
  for (const PackedFrame& f : frames) {
    for (int b = kFrameBits - 1; b >= 0; --b) {
      acc = (acc << 1) | ((f.bits >> b) & 1u);
      if (++pending == 8) {
        out.push_back(static_cast<std::uint8_t>(acc));
        acc = 0;
        pending = 0;
      }
    }
  }
  if (pending > 0) out.push_back(static_cast<std::uint8_t>(acc << (8 - pending)));
  return out;
}

ParametricStream UnpackStream(std::span<const std::uint8_t> bytes) {
  internal::ByteReader reader(bytes, "parametric stream header");
  if (bytes.size() < kMagic.size()) {
    const bool prefix = std::equal(bytes.begin(), bytes.end(), kMagic.begin());
    throw Error(prefix ? ErrorCode::kTruncated : ErrorCode::kBadMagic,
                "stream has " + std::to_string(bytes.size()) + " bytes, header needs " +
                    std::to_string(kParametricHeaderBytes));
  }
  if (!reader.TagEquals(kMagic)) {
    throw Error(ErrorCode::kBadMagic, "not a GVOXPC01 stream");
  }
  ParametricStream stream;
  const std::uint32_t count = reader.U32();
  stream.mode = reader.U8();
  stream.layout_version = reader.U8();
  if (stream.layout_version != kConditioningLayoutVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "conditioning layout version " +
                    std::to_string(stream.layout_version) + ", expected " +
                    std::to_string(kConditioningLayoutVersion));
  }
  if (stream.mode != kParametricMode) {
    throw Error(ErrorCode::kUnsupportedFormat,
                "parametric mode " + std::to_string(stream.mode));
  }
  const std::size_t expected = PayloadBytes(count);
  if (reader.remaining() < expected) {
    throw Error(ErrorCode::kTruncated,
                "payload has " + std::to_string(reader.remaining()) +
                    " bytes, expected " + std::to_string(expected) + " for " +
                    std::to_string(count) + " frames");
  }
  auto payload = reader.Take(expected);
  stream.frames.resize(count);
  std::size_t bit = 0;
  for (auto& f : stream.frames) {
    std::uint64_t v = 0;
    for (int b = 0; b < kFrameBits; ++b, ++bit) {
      v = (v << 1) | ((payload[bit / 8] >> (7 - bit % 8)) & 1u);
    }
    f.bits = v;
  }
  return stream;
}

}  // namespace gvox
