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
#include <string_view>

#include <openssl/evp.h>
#include <zlib.h>

#include "bytes.h"
#include "gvox/error.h"
#include "gvox/model.h"
#include "gvox/parametric.h"
#include "gvox/table_model.h"
#include "gvox/wavenet.h"

namespace gvox {
namespace {

constexpr std::string_view kMagic = "GVOXNN01";
constexpr std::size_t kHeaderBytes = 8 + 4 + 4;
constexpr std::size_t kCrcBytes = 4;

std::uint32_t Crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - pos, 1u << 30);
    crc = crc32(crc, bytes.data() + pos, static_cast<uInt>(n));
    pos += n;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

SymbolHistory::SymbolHistory(int length)
    : buffer_(static_cast<std::size_t>(length), kMuLawZero) {}

void SymbolHistory::Push(MuLawSymbol symbol) {
  if (buffer_.empty()) return;
  buffer_[head_] = symbol;
  head_ = (head_ + 1) % length();
}

MuLawSymbol SymbolHistory::Lag(int lag) const {
  const int n = length();
  return buffer_[((head_ - lag) % n + n) % n];
}

std::vector<MuLawSymbol> SymbolHistory::Snapshot() const {
  std::vector<MuLawSymbol> out(buffer_.size());
  for (int i = 0; i < length(); ++i) out[i] = buffer_[(head_ + i) % length()];
  return out;
}

const char* ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kWaveNet: return "wavenet";
    case ModelKind::kFrequencyTable: return "frequency-table";
    case ModelKind::kMarkovOracle: return "markov-oracle";
  }
  return "unknown";
}

std::vector<std::uint8_t> SaveModel(const ConditionalModel& model) {
  std::vector<std::uint8_t> out;
  internal::PutTag(&out, kMagic);
  internal::PutU32(&out, kWeightsVersion);
  internal::PutU32(&out, static_cast<std::uint32_t>(model.kind()));
  model.SerializeBody(&out);
  internal::PutU32(&out, Crc32(out));
  return out;
}

std::unique_ptr<ConditionalModel> LoadModel(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMagic.size() ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()),
                       kMagic.size()) != kMagic) {
    throw Error(ErrorCode::kBadMagic, "not a GVOXNN01 weights file");
  }
  if (bytes.size() < kHeaderBytes + kCrcBytes) {
    throw Error(ErrorCode::kTruncated, "weights file too short");
  }
  const auto body_end = bytes.size() - kCrcBytes;
  internal::ByteReader crc_reader(bytes.subspan(body_end), "crc");
  const std::uint32_t stored = crc_reader.U32();
  const std::uint32_t actual = Crc32(bytes.first(body_end));
  if (stored != actual) {
    throw Error(ErrorCode::kChecksumMismatch, "weights file CRC32 mismatch");
  }
  internal::ByteReader reader(bytes.first(body_end), "weights header");
  reader.Take(kMagic.size());
  const std::uint32_t version = reader.U32();
  if (version != kWeightsVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "weights version " + std::to_string(version) + ", expected " +
                    std::to_string(kWeightsVersion));
  }
  const auto kind = static_cast<ModelKind>(reader.U32());
  const auto body = bytes.subspan(kHeaderBytes, body_end - kHeaderBytes);
  switch (kind) {
    case ModelKind::kWaveNet:
      return WaveNetModel::Deserialize(body);
    case ModelKind::kFrequencyTable:
    case ModelKind::kMarkovOracle:
      return ContextTableModel::Deserialize(kind, body);
  }
  throw Error(ErrorCode::kUnsupportedFormat,
              "unknown model kind " + std::to_string(static_cast<int>(kind)));
}

std::unique_ptr<ConditionalModel> LoadModelFile(const std::filesystem::path& path) {
  return LoadModel(internal::ReadFileBytes(path));
}

void SaveModelFile(const ConditionalModel& model, const std::filesystem::path& path) {
  internal::WriteFileBytes(path, SaveModel(model));
}

ModelFingerprint Fingerprint(const ConditionalModel& model) {
  const auto bytes = SaveModel(model);
  ModelFingerprint digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1 ||
      len != digest.size()) {
    throw Error(ErrorCode::kStateError, "SHA-256 failed");
  }
  return digest;
}

std::string ToHex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 15]);
  }
  return out;
}

LogLikelihoodTrace LogLikelihood(const ConditionalModel& model,
                                 const PcmSignal& signal,
                                 const ConditioningTrack& track,
                                 const std::vector<bool>* exclude) {
  if (track.rows() < signal.size()) {
    throw Error(ErrorCode::kAlignment,
                "conditioning has " + std::to_string(track.rows()) +
                    " rows for " + std::to_string(signal.size()) + " samples");
  }
  if (exclude && exclude->size() != signal.size()) {
    throw Error(ErrorCode::kAlignment, "exclusion mask length mismatch");
  }
  LogLikelihoodTrace out;
  out.log2_prob.resize(signal.size());
  out.expected.resize(signal.size());
  auto session = model.NewSession();
  double sum = 0.0;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const MuLawSymbol n = MuLawEncode(signal.samples[i]);
    const auto q = session->NextDistribution(track.Row(i));
    out.log2_prob[i] = std::log2(q[n]);
    double e = 0.0;
    for (double p : q.Unfloored()) {
      if (p > 0.0) e += p * std::log2(p);
    }
    out.expected[i] = e;
    if (!exclude || !(*exclude)[i]) {
      sum += out.log2_prob[i];
      ++out.counted;
    }
    session->Advance(n);
  }
  out.mean = out.counted ? sum / static_cast<double>(out.counted) : 0.0;
  return out;
}

LikelihoodComparison CompareLikelihood(const LogLikelihoodTrace& trace,
                                       std::size_t window) {
  if (window == 0) throw Error(ErrorCode::kInvalidArgument, "window must be positive");
  auto average = [window](const std::vector<double>& x) {
    std::vector<double> out(x.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum += x[i];
      if (i >= window) sum -= x[i - window];
      out[i] = sum / static_cast<double>(std::min(i + 1, window));
    }
    return out;
  };
  return {average(trace.log2_prob), average(trace.expected)};
}

}  // namespace gvox
