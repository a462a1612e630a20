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

#include <fstream>
#include <iterator>

#include "bytes.h"
#include "gvox/error.h"
#include "gvox/signal_io.h"

namespace gvox {

namespace internal {

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

}  // namespace internal

using internal::ByteReader;

bool IsSupportedRate(int sample_rate_hz) {
  return sample_rate_hz == kNarrowbandRate || sample_rate_hz == kWidebandRate;
}

PcmSignal ParseWav(std::span<const std::uint8_t> bytes) {
  ByteReader reader(bytes, "wav", ErrorCode::kMalformedHeader);
  if (bytes.size() < 12 || !reader.TagEquals("RIFF")) {
    throw Error(ErrorCode::kMalformedHeader, "missing RIFF tag");
  }
  reader.U32();  // riff size; often wrong in the wild, not trusted
  if (!reader.TagEquals("WAVE")) {
    throw Error(ErrorCode::kMalformedHeader, "missing WAVE tag");
  }

  bool have_fmt = false;
  int channels = 0;
  int rate = 0;
  int bits = 0;
  while (reader.remaining() >= 8) {
    auto id = reader.Take(4);
    const std::uint32_t size = reader.U32();
    const std::string tag(id.begin(), id.end());
    if (tag == "fmt ") {
      if (size < 16) throw Error(ErrorCode::kMalformedHeader, "short fmt chunk");
      auto body = reader.Take(size);
      ByteReader fmt(body, "fmt chunk", ErrorCode::kMalformedHeader);
      const std::uint16_t format = fmt.U16();
      channels = fmt.U16();
      rate = static_cast<int>(fmt.U32());
      fmt.U32();  // byte rate
      fmt.U16();  // block align
      bits = fmt.U16();
      // WAVE_FORMAT_EXTENSIBLE carries the real tag in its sub-format GUID.
      std::uint16_t effective = format;
      if (format == 0xFFFE && size >= 40) {
        fmt.U16();
        fmt.U16();
        fmt.U32();
        effective = fmt.U16();
      }
      if (effective != 1 || bits != 16) {
        throw Error(ErrorCode::kUnsupportedFormat,
                    "only 16-bit PCM is supported (format " +
                        std::to_string(effective) + ", " +
                        std::to_string(bits) + " bits)");
      }
      if (channels != 1) {
        throw Error(ErrorCode::kUnsupportedChannels,
                    std::to_string(channels) + " channels, expected mono");
      }
      if (!IsSupportedRate(rate)) {
        throw Error(ErrorCode::kUnsupportedRate,
                    std::to_string(rate) + " Hz, expected 8000 or 16000");
      }
      have_fmt = true;
      if (size & 1) reader.Take(1);
    } else if (tag == "data") {
      if (!have_fmt) throw Error(ErrorCode::kMalformedHeader, "data before fmt");
      if (size % 2 != 0) {
        throw Error(ErrorCode::kMalformedHeader, "odd data chunk size");
      }
      auto data = reader.Take(size);
      PcmSignal signal;
      signal.sample_rate_hz = rate;
      signal.samples.resize(size / 2);
      for (std::size_t i = 0; i < signal.samples.size(); ++i) {
        signal.samples[i] = static_cast<std::int16_t>(
            static_cast<std::uint16_t>(data[2 * i] | (data[2 * i + 1] << 8)));
      }
      return signal;
    } else {
      reader.Take(size + (size & 1));
    }
  }
  throw Error(ErrorCode::kMalformedHeader, "no data chunk");
}

std::vector<std::uint8_t> SerializeWav(const PcmSignal& signal) {
  if (!IsSupportedRate(signal.sample_rate_hz)) {
    throw Error(ErrorCode::kUnsupportedRate,
                std::to_string(signal.sample_rate_hz) + " Hz");
  }
  const auto data_bytes = static_cast<std::uint32_t>(signal.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  internal::PutTag(&out, "RIFF");
  internal::PutU32(&out, 36 + data_bytes);
  internal::PutTag(&out, "WAVE");
  internal::PutTag(&out, "fmt ");
  internal::PutU32(&out, 16);
  internal::PutU16(&out, 1);
  internal::PutU16(&out, 1);
  internal::PutU32(&out, static_cast<std::uint32_t>(signal.sample_rate_hz));
  internal::PutU32(&out, static_cast<std::uint32_t>(signal.sample_rate_hz) * 2);
  internal::PutU16(&out, 2);
  internal::PutU16(&out, 16);
  internal::PutTag(&out, "data");
  internal::PutU32(&out, data_bytes);
  for (std::int16_t s : signal.samples) {
    internal::PutU16(&out, static_cast<std::uint16_t>(s));
  }
  return out;
}

PcmSignal ReadWav(const std::filesystem::path& path) {
  return ParseWav(internal::ReadFileBytes(path));
}

void WriteWav(const PcmSignal& signal, const std::filesystem::path& path) {
  internal::WriteFileBytes(path, SerializeWav(signal));
}

}  // namespace gvox
