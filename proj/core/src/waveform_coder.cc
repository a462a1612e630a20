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

#include "gvox/waveform_coder.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "bytes.h"
#include "gvox/error.h"
#include "gvox/range_coder.h"

namespace gvox {
namespace {

constexpr std::string_view kMagic = "GVOXWF01";

void CheckQuantizer(const QuantizerSpec& q) {
  if (q.levels < 2 || q.levels > kAlphabetSize ||
      !std::has_single_bit(static_cast<unsigned>(q.levels))) {
    throw Error(ErrorCode::kInvalidArgument,
                "quantizer levels must be a power of two in [2, 256], got " +
                    std::to_string(q.levels));
  }
}

void CheckModel(const ConditionalModel& model) {
  if (model.conditioning_dim() != kConditioningDim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "model conditioning dim " +
                    std::to_string(model.conditioning_dim()) + ", stream carries " +
                    std::to_string(kConditioningDim));
  }
}

// Distribution actually coded at one step: the model output, or its
// coarsened version when the quantizer has fewer levels.
SymbolDistribution CodingDistribution(const SymbolDistribution& q,
                                      const QuantizerSpec& quantizer) {
  if (quantizer.levels == kAlphabetSize) return q;
  return SymbolDistribution::FromWeights(CoarsenDistribution(q, quantizer));
}

struct LoopResult {
  InfoTrace trace;
  std::vector<std::uint8_t> payload;
};

// Shared encoder loop; `encoder` may be null for rate-only runs.
LoopResult RunEncoderLoop(const PcmSignal& signal, const ConditioningTrack& track,
                          const ConditionalModel& model,
                          const QuantizerSpec& quantizer,
                          const std::vector<bool>& silent, bool code) {
  LoopResult result;
  const std::size_t n = signal.size();
  result.trace.h_bits.resize(n);
  result.trace.r_bits.resize(n);
  result.trace.silent = silent;
  RangeEncoder encoder;
  auto session = model.NewSession();
  for (std::size_t i = 0; i < n; ++i) {
    const SymbolDistribution q =
        CodingDistribution(session->NextDistribution(track.Row(i)), quantizer);
    const MuLawSymbol symbol =
        quantizer.Representative(quantizer.IndexOf(MuLawEncode(signal.samples[i])));
    if (code) encoder.Encode(symbol, QuantizePmf(q));
    result.trace.h_bits[i] = ConditionalEntropy(q);
    result.trace.r_bits[i] = -std::log2(q[symbol]);
    session->Advance(symbol);
  }
  if (code) result.payload = encoder.Finish();
  return result;
}

void CheckInputs(const PcmSignal& signal, std::span<const PackedFrame> frames,
                 const ConditionalModel& model, const QuantizerSpec& quantizer) {
  if (signal.sample_rate_hz != kWidebandRate) {
    throw Error(ErrorCode::kUnsupportedRate,
                "waveform coder needs 16000 Hz input, got " +
                    std::to_string(signal.sample_rate_hz));
  }
  if (frames.size() * kFrameSamples16k < signal.size()) {
    throw Error(ErrorCode::kAlignment,
                std::to_string(frames.size()) + " frames cover " +
                    std::to_string(frames.size() * kFrameSamples16k) +
                    " samples, signal has " + std::to_string(signal.size()));
  }
  CheckQuantizer(quantizer);
  CheckModel(model);
}

std::vector<bool> MaskFor(const PcmSignal& signal,
                          const WaveformEncodeOptions& options) {
  if (!options.silence_threshold_db) return std::vector<bool>(signal.size(), false);
  return SilenceSampleMask(signal, *options.silence_threshold_db);
}

}  // namespace

MuLawSymbol QuantizerSpec::Representative(int index) const {
  return static_cast<MuLawSymbol>(index * group() + group() / 2);
}

int QuantizerSpec::IndexOf(MuLawSymbol code) const { return code / group(); }

std::vector<double> CoarsenDistribution(const SymbolDistribution& dist,
                                        const QuantizerSpec& quantizer) {
  CheckQuantizer(quantizer);
  std::vector<double> out(kAlphabetSize, 0.0);
  for (int s = 0; s < kAlphabetSize; ++s) {
    out[quantizer.Representative(quantizer.IndexOf(static_cast<MuLawSymbol>(s)))] +=
        dist[static_cast<MuLawSymbol>(s)];
  }
  return out;
}

WaveformEncoding EncodeWaveform(const PcmSignal& signal,
                                std::span<const PackedFrame> frames,
                                const ConditionalModel& model,
                                const WaveformEncodeOptions& options) {
  CheckInputs(signal, frames, model, options.quantizer);
  WaveformEncoding out;
  // Conditioning comes from the transmitted bits, exactly as the decoder
  // will rebuild it.
  const auto parametric = PackStream(frames);
  out.conditioning = ConditioningFromStream(UnpackStream(parametric), kWidebandRate);
  auto loop = RunEncoderLoop(signal, out.conditioning, model, options.quantizer,
                             MaskFor(signal, options), /*code=*/true);

  const bool levels = options.quantizer.levels != kAlphabetSize;
  internal::PutTag(&out.bytes, kMagic);
  internal::PutU32(&out.bytes, levels ? kWaveformVersionLevels : kWaveformVersion);
  internal::PutU32(&out.bytes, static_cast<std::uint32_t>(signal.size()));
  internal::PutU32(&out.bytes, static_cast<std::uint32_t>(signal.sample_rate_hz));
  if (levels) {
    internal::PutU32(&out.bytes, static_cast<std::uint32_t>(options.quantizer.levels));
  }
  internal::PutBytes(&out.bytes, Fingerprint(model));
  internal::PutU32(&out.bytes, static_cast<std::uint32_t>(parametric.size()));
  internal::PutBytes(&out.bytes, parametric);
  internal::PutU32(&out.bytes, static_cast<std::uint32_t>(loop.payload.size()));
  internal::PutBytes(&out.bytes, loop.payload);

  out.report = SummarizeTrace(loop.trace, kWidebandRate);
  out.report.payload_bits = loop.payload.size() * 8;
  out.report.payload_bits_per_sample =
      signal.size() == 0 ? 0.0
                         : static_cast<double>(*out.report.payload_bits) /
                               static_cast<double>(signal.size());
  if (options.keep_trace) out.trace = std::move(loop.trace);
  return out;
}

RateReport WaveformRateReport(const PcmSignal& signal,
                              std::span<const PackedFrame> frames,
                              const ConditionalModel& model,
                              const WaveformEncodeOptions& options) {
  CheckInputs(signal, frames, model, options.quantizer);
  const auto track = ConditioningFromStream(UnpackStream(PackStream(frames)),
                                            kWidebandRate);
  const auto loop = RunEncoderLoop(signal, track, model, options.quantizer,
                                   MaskFor(signal, options), /*code=*/false);
  return SummarizeTrace(loop.trace, kWidebandRate);
}

WaveformDecoding DecodeWaveform(std::span<const std::uint8_t> bytes,
                                const ConditionalModel& model) {
  internal::ByteReader reader(bytes, "waveform bitstream");
  if (!reader.TagEquals(kMagic)) {
    throw Error(ErrorCode::kBadMagic, "not a GVOXWF01 waveform bitstream");
  }
  const std::uint32_t version = reader.U32();
  if (version != kWaveformVersion && version != kWaveformVersionLevels) {
    throw Error(ErrorCode::kVersionMismatch,
                "unsupported waveform container version " + std::to_string(version));
  }
  const std::uint32_t count = reader.U32();
  const std::uint32_t rate = reader.U32();
  if (rate != static_cast<std::uint32_t>(kWidebandRate)) {
    throw Error(ErrorCode::kUnsupportedRate,
                "waveform stream at " + std::to_string(rate) + " Hz");
  }
  QuantizerSpec quantizer;
  if (version == kWaveformVersionLevels) {
    quantizer.levels = static_cast<int>(reader.U32());
    try {
      CheckQuantizer(quantizer);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMalformedHeader, e.what());
    }
  }
  const auto stored = reader.Take(32);
  const ModelFingerprint expected = Fingerprint(model);
  if (!std::equal(stored.begin(), stored.end(), expected.begin())) {
    throw Error(ErrorCode::kChecksumMismatch,
                "stream was coded with weights " + ToHex(stored) +
                    ", loaded weights are " + ToHex(expected));
  }
  CheckModel(model);
  const std::uint32_t parametric_len = reader.U32();
  const auto stream = UnpackStream(reader.Take(parametric_len));
  if (stream.frames.size() * kFrameSamples16k < count) {
    throw Error(ErrorCode::kAlignment,
                "sample count " + std::to_string(count) + " exceeds the " +
                    std::to_string(stream.frames.size()) + " coded frames");
  }
  const std::uint32_t payload_len = reader.U32();
  const auto payload = reader.Take(payload_len);
  if (reader.remaining() != 0) {
    throw Error(ErrorCode::kMalformedHeader, "trailing bytes after payload");
  }

  WaveformDecoding out;
  out.conditioning = ConditioningFromStream(stream, kWidebandRate);
  out.signal.sample_rate_hz = kWidebandRate;
  out.signal.samples.resize(count);
  auto session = model.NewSession();
  RangeDecoder decoder(payload);
  for (std::size_t i = 0; i < count; ++i) {
    const SymbolDistribution q =
        CodingDistribution(session->NextDistribution(out.conditioning.Row(i)),
                           quantizer);
    int symbol = 0;
    try {
      symbol = decoder.Decode(QuantizePmf(q));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnderrun) throw;
      throw Error(ErrorCode::kUnderrun,
                  "payload exhausted at sample " + std::to_string(i) + " of " +
                      std::to_string(count));
    }
    out.signal.samples[i] = MuLawDecode(static_cast<MuLawSymbol>(symbol));
    session->Advance(static_cast<MuLawSymbol>(symbol));
  }
  return out;
}

PcmSignal MuLawTranscode(const PcmSignal& signal, const QuantizerSpec& quantizer) {
  CheckQuantizer(quantizer);
  PcmSignal out;
  out.sample_rate_hz = signal.sample_rate_hz;
  out.samples.reserve(signal.size());
  for (std::int16_t x : signal.samples) {
    out.samples.push_back(
        MuLawDecode(quantizer.Representative(quantizer.IndexOf(MuLawEncode(x)))));
  }
  return out;
}

std::vector<bool> SilenceSampleMask(const PcmSignal& signal, double threshold_db) {
  constexpr int kFrameMs = 20;
  return ExpandFrameMask(DetectSilence(signal, kFrameMs, threshold_db),
                         static_cast<std::size_t>(signal.sample_rate_hz) * kFrameMs / 1000,
                         signal.size());
}

}  // namespace gvox
