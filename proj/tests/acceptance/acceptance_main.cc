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

// Acceptance suite. Prints one PASS or FAIL line per criterion and exits
// nonzero if any criterion fails. Runtime limits are part of each criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gvox/error.h"
#include "gvox/model.h"
#include "gvox/parametric.h"
#include "gvox/parametric_decoder.h"
#include "gvox/range_coder.h"
#include "gvox/rate_analysis.h"
#include "gvox/signal_io.h"
#include "gvox/table_model.h"
#include "gvox/waveform_coder.h"
#include "gvox/wavenet.h"
#include "support/g711_oracle.h"
#include "support/markov_oracle.h"
#include "support/signals.h"

namespace gvox {
namespace {

using testing::Matrix;
using testing::Pmf;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += "violated: " + what;
    }
  }
  void Note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c);
  return buf;
}

// Closed-form entropy in long double, independent of the library.
double OracleEntropy(const Pmf& p) {
  long double h = 0.0L;
  for (double v : p) {
    if (v > 0.0) h -= static_cast<long double>(v) * std::log2(static_cast<long double>(v));
  }
  return static_cast<double>(h);
}

std::vector<SymbolRow> ToRows(const Matrix& m) {
  std::vector<SymbolRow> rows(kAlphabetSize);
  for (int s = 0; s < kAlphabetSize; ++s) std::copy(m[s].begin(), m[s].end(), rows[s].begin());
  return rows;
}

// Codes that survive a PCM round trip (0x7F decodes to the same value as 0xFF).
std::vector<int> RoundTripCodes(int first, int stride) {
  std::vector<int> codes;
  for (int c = first; c < kAlphabetSize; c += stride) {
    if (c != 0x7F) codes.push_back(c);
  }
  return codes;
}

WaveNetConfig ToyConfig() {
  WaveNetConfig c;
  c.residual_channels = 6;
  c.skip_channels = 8;
  c.stacks = 1;
  c.layers_per_stack = 4;
  return c;
}

// 1. mu-law tables against the G.191 reference, exhaustively.
Outcome MuLawExactness() {
  Outcome o;
  int encode_mismatch = 0, decode_mismatch = 0;
  for (int x = -32768; x <= 32767; ++x) {
    const auto s = static_cast<std::int16_t>(x);
    encode_mismatch += MuLawEncode(s) != testing::G191UlawCompress(s);
  }
  for (int c = 0; c < kAlphabetSize; ++c) {
    const auto code = static_cast<MuLawSymbol>(c);
    decode_mismatch += MuLawDecode(code) != testing::G191UlawExpand(code);
  }
  o.Require(encode_mismatch == 0, std::to_string(encode_mismatch) + " encode mismatches");
  o.Require(decode_mismatch == 0, std::to_string(decode_mismatch) + " decode mismatches");
  o.Note("65536 inputs and 256 codes checked");
  return o;
}

// 2. decode(encode(x)) equals the mu-law transcode on files written to disk.
Outcome WaveformEquivalence() {
  Outcome o;
  const WaveNetModel model(InitWeights(ToyConfig(), 11));
  testing::TempDir dir;
  int exact = 0, total = 0;
  std::size_t samples = 0;
  for (int i = 0; i < 25; ++i) {
    const bool speech = i >= 20;
    const std::size_t n = 4000 + 331 * i;
    const auto original = speech ? testing::SpeechLikeSignal(n, 100 + i)
                                 : testing::RandomSignal(n, 200 + i);
    const auto path = dir / ("input" + std::to_string(i) + ".wav");
    WriteWav(original, path);
    const auto signal = ReadWav(path);
    const auto frames = EncodeParametric(signal);
    const auto encoded = EncodeWaveform(signal, frames, model);
    const auto decoded = DecodeWaveform(encoded.bytes, model);
    ++total;
    samples += signal.size();
    if (decoded.signal == MuLawTranscode(signal)) {
      ++exact;
    } else {
      o.Require(false, std::string(speech ? "speech-like" : "random") + " file " +
                           std::to_string(i) + " differs");
    }
  }
  o.Note(std::to_string(exact) + "/" + std::to_string(total) + " files sample-exact, " +
         std::to_string(samples) + " samples");
  return o;
}

// 3. Range coder output against the ideal code length.
Outcome CoderOverhead() {
  Outcome o;
  constexpr std::size_t kSymbols = 100000;
  std::mt19937_64 rng(31);
  std::vector<int> all(kAlphabetSize);
  std::iota(all.begin(), all.end(), 0);
  RangeEncoder encoder;
  std::vector<FreqTable> tables;
  std::vector<int> symbols;
  tables.reserve(kSymbols);
  long double ideal = 0.0L;
  for (std::size_t i = 0; i < kSymbols; ++i) {
    const double alpha = 0.05 + 2.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    const Pmf p = testing::RandomPmf(rng, all, alpha);
    const auto table = QuantizePmf(SymbolDistribution::FromWeights(p));
    std::discrete_distribution<int> draw(p.begin(), p.end());
    const int s = draw(rng);
    encoder.Encode(s, table);
    ideal -= std::log2(static_cast<long double>(table.frequency(s)) / kFreqTotal);
    tables.push_back(table);
    symbols.push_back(s);
  }
  const auto bytes = encoder.Finish();
  const double emitted = 8.0 * static_cast<double>(bytes.size());
  const double overhead = emitted - static_cast<double>(ideal);
  RangeDecoder decoder(bytes);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < kSymbols; ++i) wrong += decoder.Decode(tables[i]) != symbols[i];
  o.Require(overhead <= 64.0, Fmt("overhead %.2f bits > 64", overhead));
  o.Require(wrong == 0, std::to_string(wrong) + " symbols decoded wrongly");
  o.Note(Fmt("emitted %.0f bits, ideal %.2f, overhead %.2f", emitted,
             static_cast<double>(ideal), overhead));
  return o;
}

// 4. Coding p with a mismatched q costs H(p) + KL(p||q).
Outcome MismatchPenalty() {
  Outcome o;
  constexpr std::size_t kSymbols = 100000;
  std::mt19937_64 rng(41);
  std::vector<int> all(kAlphabetSize);
  std::iota(all.begin(), all.end(), 0);
  // p is concentrated on a subset. q covers every symbol so KL stays finite
  // and no flooring alters it.
  const Pmf p = testing::RandomPmf(rng, RoundTripCodes(3, 5), 0.8);
  Pmf q = testing::RandomPmf(rng, all, 1.5);
  for (double& v : q) v = 0.5 * v + 0.5 / kAlphabetSize;
  const auto q_dist = SymbolDistribution::FromWeights(q);
  const auto table = QuantizePmf(q_dist);
  std::discrete_distribution<int> draw(p.begin(), p.end());
  RangeEncoder encoder;
  for (std::size_t i = 0; i < kSymbols; ++i) encoder.Encode(draw(rng), table);
  const double rate = 8.0 * encoder.Finish().size() / kSymbols;
  long double kl = 0.0L;
  for (int s = 0; s < kAlphabetSize; ++s) {
    if (p[s] > 0) kl += p[s] * std::log2(static_cast<long double>(p[s]) / q[s]);
  }
  const double h = OracleEntropy(p);
  const double predicted = h + static_cast<double>(kl);
  o.Require(!q_dist.floored(), "q was floored");
  o.Require(std::abs(rate - predicted) <= 0.05,
            Fmt("rate %.4f vs H+KL %.4f", rate, predicted));
  o.Note(Fmt("rate %.4f, H(p) %.4f, H+KL %.4f bits/symbol", rate, h, predicted));
  return o;
}

// 5. Oracle model on data it generated: R and H-bar agree with each other
// and with the entropy rate of the chain.
Outcome Concentration() {
  Outcome o;
  constexpr std::size_t kSamples = 100000;
  std::mt19937_64 rng(51);
  Matrix chain(kAlphabetSize);
  const auto codes = RoundTripCodes(0x81, 7);
  for (auto& row : chain) row = testing::RandomPmf(rng, codes, 0.5);
  const auto model = MakeOrder1Oracle(ToRows(chain));
  const auto track = testing::ConstantTrack(kConditioningDim, kSamples);
  SynthesisOptions options;
  options.seed = 52;
  const auto generated = SynthesizeFromTrack(track, *model, options);
  const auto trace = ComputeInfoTrace(*model, generated, track);
  const auto report = SummarizeTrace(trace, kWidebandRate);
  // Closed form: stationary distribution times row entropies.
  const Pmf pi = testing::Stationary(chain);
  long double rate = 0.0L;
  for (int s = 0; s < kAlphabetSize; ++s) rate += pi[s] * OracleEntropy(chain[s]);
  const double h = static_cast<double>(rate);
  o.Require(generated.size() == kSamples, "generated length");
  o.Require(std::abs(report.r - report.h_bar) <= 0.03,
            Fmt("|R - Hbar| = %.4f", std::abs(report.r - report.h_bar)));
  o.Require(std::abs(report.r - h) <= 0.03, Fmt("|R - h| = %.4f", std::abs(report.r - h)));
  o.Require(std::abs(report.h_bar - h) <= 0.03,
            Fmt("|Hbar - h| = %.4f", std::abs(report.h_bar - h)));
  o.Note(Fmt("R %.4f, Hbar %.4f, entropy rate %.4f bits/sample", report.r, report.h_bar, h));
  return o;
}

// 6. Chain rule on every small enumerable block source.
Outcome ChainRule() {
  Outcome o;
  std::mt19937_64 rng(61);
  double worst = 0.0;
  int cases = 0;
  for (int a = 2; a <= 4; ++a) {
    for (int b = 2; b <= 4; ++b) {
      for (int len = 1; len <= 3; ++len) {
        JointBlockSource src;
        src.s_alphabet = a;
        src.theta_alphabet = b;
        src.block_length = len;
        std::size_t ns = 1, nt = 1;
        for (int i = 0; i < len; ++i) {
          ns *= a;
          nt *= b;
        }
        std::gamma_distribution<double> g(0.4, 1.0);
        src.pmf.resize(ns * nt);
        long double total = 0.0L;
        for (double& v : src.pmf) total += (v = g(rng));
        for (double& v : src.pmf) v = static_cast<double>(v / total);
        const auto rates = ChainRuleCheck(src);
        long double joint = 0.0L, theta = 0.0L, cond = 0.0L;
        for (std::size_t t = 0; t < nt; ++t) {
          long double pt = 0.0L;
          for (std::size_t s = 0; s < ns; ++s) pt += src.pmf[s + ns * t];
          if (pt > 0) theta -= pt * std::log2(pt);
          for (std::size_t s = 0; s < ns; ++s) {
            const long double p = src.pmf[s + ns * t];
            if (p <= 0) continue;
            joint -= p * std::log2(p);
            cond -= p * std::log2(p / pt);
          }
        }
        worst = std::max({worst, rates.additivity_error,
                          std::abs(rates.joint - static_cast<double>(joint / len)),
                          std::abs(rates.theta - static_cast<double>(theta / len)),
                          std::abs(rates.conditional - static_cast<double>(cond / len))});
        ++cases;
      }
    }
  }
  o.Require(worst <= 1e-9, Fmt("worst error %.3g", worst));
  o.Note(std::to_string(cases) + " sources, worst error " + Fmt("%.3g", worst));
  return o;
}

// 7a. Analytic gradient against central differences on every group.
Outcome GradientCheck() {
  Outcome o;
  WaveNetConfig config;
  config.conditioning_dim = 3;
  config.residual_channels = 8;
  config.skip_channels = 8;
  config.stacks = 1;
  config.layers_per_stack = 2;
  const WaveNetLayout layout(config);
  auto weights = InitWeights(config, 71);
  std::mt19937_64 rng(72);
  std::normal_distribution<double> g(0.0, 0.3);
  for (double& v : weights.params) v += g(rng);
  std::vector<MuLawSymbol> symbols(16);
  for (auto& s : symbols) s = static_cast<MuLawSymbol>(rng() & 0xFF);
  std::vector<double> thetas(symbols.size() * config.conditioning_dim);
  for (double& v : thetas) v = g(rng) * 3.0;
  std::vector<double> grad;
  WindowLossAndGradient(layout, weights.params, symbols, thetas, 2, &grad);
  auto params = weights.params;
  constexpr double kStep = 1e-3;
  double worst = 0.0;
  std::string worst_group;
  int checked = 0;
  for (const auto& group : layout.groups()) {
    if (!layout.IsTrainable(group)) continue;
    ++checked;
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = group.offset; i < group.offset + group.size(); ++i) {
      const double saved = params[i];
      params[i] = saved + kStep;
      const double up = WindowLossAndGradient(layout, params, symbols, thetas, 2, nullptr);
      params[i] = saved - kStep;
      const double down = WindowLossAndGradient(layout, params, symbols, thetas, 2, nullptr);
      params[i] = saved;
      const double numeric = (up - down) / (2 * kStep);
      diff += (numeric - grad[i]) * (numeric - grad[i]);
      norm += numeric * numeric + grad[i] * grad[i];
    }
    o.Require(norm > 0.0, group.name + " has zero gradient");
    const double rel = std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300);
    if (rel > worst) {
      worst = rel;
      worst_group = group.name;
    }
  }
  o.Require(worst <= 1e-4, Fmt("relative error %.3g", worst) + " in " + worst_group);
  o.Note(std::to_string(checked) + " trainable groups, worst relative error " +
         Fmt("%.3g", worst) + " (" + worst_group + ")");
  return o;
}

// 7b. Training on an order-2 Markov source approaches its entropy rate.
Outcome MarkovTraining() {
  Outcome o;
  constexpr int kStates = 4;
  const int codes[kStates] = {0xF0, 0xE0, 0x70, 0x60};
  std::mt19937_64 rng(73);
  Matrix next(kStates * kStates);  // row a*4+b: law of the symbol after (a, b)
  for (auto& row : next) {
    const Pmf p = testing::RandomPmf(rng, {0, 1, 2, 3}, 0.7);
    row.assign(p.begin(), p.begin() + kStates);
  }
  // Closed form on the pair chain (a, b) -> (b, c).
  Matrix pair(kStates * kStates, Pmf(kStates * kStates, 0.0));
  for (int a = 0; a < kStates; ++a) {
    for (int b = 0; b < kStates; ++b) {
      for (int c = 0; c < kStates; ++c) pair[a * kStates + b][b * kStates + c] = next[a * kStates + b][c];
    }
  }
  const Pmf pi = testing::Stationary(pair);
  long double rate = 0.0L;
  for (std::size_t s = 0; s < pair.size(); ++s) rate += pi[s] * OracleEntropy(next[s]);
  const double h = static_cast<double>(rate);

  auto generate = [&](std::size_t n, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::vector<int> states = {0, 0};
    while (states.size() < n) {
      const auto& row = next[states[states.size() - 2] * kStates + states.back()];
      states.push_back(std::discrete_distribution<int>(row.begin(), row.end())(g));
    }
    PcmSignal signal;
    for (int s : states) signal.samples.push_back(MuLawDecode(static_cast<MuLawSymbol>(codes[s])));
    return signal;
  };
  TrainingExample example;
  example.signal = generate(60000, 74);
  example.track = testing::ConstantTrack(1, example.signal.size());
  TrainConfig tc;
  tc.architecture.conditioning_dim = 1;
  tc.architecture.residual_channels = 16;
  tc.architecture.skip_channels = 32;
  tc.architecture.stacks = 1;
  tc.architecture.layers_per_stack = 2;
  tc.steps = 400;
  tc.seed = 75;
  const auto result = Train({example}, tc);
  const WaveNetModel model(result.weights);
  const auto held_out = generate(20000, 76);
  const auto trace = ComputeInfoTrace(model, held_out, testing::ConstantTrack(1, held_out.size()));
  const double ce = SummarizeTrace(trace, kWidebandRate).r;
  o.Require(std::abs(ce - h) <= 0.1, Fmt("cross-entropy %.4f vs entropy rate %.4f", ce, h));
  o.Note(Fmt("held-out cross-entropy %.4f, entropy rate %.4f, gap %.4f", ce, h, ce - h));
  return o;
}

Outcome TrainingSanity() {
  Outcome grad = GradientCheck();
  Outcome train = MarkovTraining();
  Outcome o;
  o.pass = grad.pass && train.pass;
  o.detail = "gradient: " + grad.detail + " | training: " + train.detail;
  return o;
}

// 8. Bit budget, packing identity and LSF ordering.
Outcome ParametricBitstream() {
  Outcome o;
  int field_bits = kPitchBits + kPowerBits + kVoicingBits;
  for (int b : kLsfBits) field_bits += b;
  o.Require(field_bits == 50 && kFrameBits == 50, "field widths do not total 50 bits");
  std::mt19937_64 rng(81);
  int pack_failures = 0, order_failures = 0, size_failures = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    QuantizerIndices idx;
    for (int k = 0; k < kLpcOrder; ++k) idx.lsf[k] = static_cast<int>(rng() % (1u << kLsfBits[k]));
    idx.pitch = static_cast<int>(rng() % (1u << kPitchBits));
    idx.power = static_cast<int>(rng() % (1u << kPowerBits));
    idx.voicing = static_cast<int>(rng() % (1u << kVoicingBits));
    const auto packed = PackIndices(idx);
    pack_failures += packed.bits >> 50 != 0 || !(UnpackIndices(packed) == idx);
    // Any 50-bit pattern decodes to ordered LSFs.
    const PackedFrame raw{rng() >> 14};
    for (const auto& lsf : {DequantizeFrame(raw).lsf, DequantizeFrame(packed).lsf}) {
      for (int k = 1; k < kLpcOrder; ++k) order_failures += !(lsf[k] > lsf[k - 1]);
      order_failures += !(lsf[0] > 0.0) || !(lsf[kLpcOrder - 1] < std::numbers::pi);
    }
  }
  // Whole streams: payload is exactly 50 bits per frame, MSB first.
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<PackedFrame> frames(rng() % 64);
    for (auto& f : frames) f.bits = rng() >> 14;
    const auto bytes = PackStream(frames);
    const std::size_t payload = bytes.size() - kParametricHeaderBytes;
    size_failures += payload != (50 * frames.size() + 7) / 8;
    for (std::size_t f = 0; f < frames.size(); ++f) {
      std::uint64_t bits = 0;
      for (std::size_t b = 50 * f; b < 50 * f + 50; ++b) {
        bits = (bits << 1) | ((bytes[kParametricHeaderBytes + b / 8] >> (7 - b % 8)) & 1u);
      }
      pack_failures += bits != frames[f].bits;
    }
    pack_failures += !(UnpackStream(bytes).frames == frames);
  }
  o.Require(pack_failures == 0, std::to_string(pack_failures) + " packing failures");
  o.Require(order_failures == 0, std::to_string(order_failures) + " LSF ordering failures");
  o.Require(size_failures == 0, std::to_string(size_failures) + " stream size failures");
  o.Note("50 bits/frame, 10000 random cases, 200 streams");
  return o;
}

// 9. Bit-identical synthesis, training and weights round trip.
Outcome Determinism() {
  Outcome o;
  const WaveNetModel model(InitWeights(ToyConfig(), 91));
  const auto speech = testing::SpeechLikeSignal(8000, 92);
  const auto bitstream = PackStream(EncodeParametric(speech));
  SynthesisOptions options;
  options.seed = 93;
  o.Require(Synthesize(bitstream, model, options) == Synthesize(bitstream, model, options),
            "synthesis differs between runs");

  TrainingExample example;
  example.signal = speech;
  example.track = ConditioningFromStream(UnpackStream(bitstream), kWidebandRate);
  TrainConfig tc;
  tc.architecture = ToyConfig();
  tc.steps = 20;
  tc.batch_size = 2;
  tc.window = 64;
  tc.seed = 94;
  const auto first = Train({example}, tc);
  const auto second = Train({example}, tc);
  o.Require(first.weights == second.weights, "trained weights differ between runs");
  o.Require(first.loss_bits == second.loss_bits, "loss curves differ between runs");

  const WaveNetModel trained(first.weights);
  const auto bytes = SaveModel(trained);
  const auto loaded = LoadModel(bytes);
  const auto* as_wavenet = dynamic_cast<const WaveNetModel*>(loaded.get());
  o.Require(as_wavenet != nullptr && as_wavenet->weights() == first.weights,
            "weights changed in memory round trip");
  o.Require(SaveModel(*loaded) == bytes, "re-serialized bytes differ");
  testing::TempDir dir;
  SaveModelFile(trained, dir / "model.gvw");
  o.Require(SaveModel(*LoadModelFile(dir / "model.gvw")) == bytes, "file round trip differs");
  o.Note("synthesis, 20-step training and weights file checked");
  return o;
}

// 10. Information trace separates a noisy regime from a structured one.
Outcome TwoRegimeTrace() {
  Outcome o;
  std::mt19937_64 rng(101);
  ContextTable noisy, voiced;
  const Pmf p_noisy = testing::RandomPmf(rng, RoundTripCodes(0, 2), 3.0);
  const Pmf p_voiced = testing::RandomPmf(rng, {0x10, 0x30, 0x90, 0xB0, 0xC4, 0xE7}, 1.0);
  std::copy(p_noisy.begin(), p_noisy.end(), noisy.fallback.begin());
  std::copy(p_voiced.begin(), p_voiced.end(), voiced.fallback.begin());
  const double gap = OracleEntropy(p_noisy) - OracleEntropy(p_voiced);
  const auto model = MakeMarkovOracle(0, {noisy, voiced}, 1, 0);

  constexpr std::size_t kSegment = 1600, kSegments = 40;
  ConditioningTrack track(1, kSegment * kSegments);
  std::vector<MuLawSymbol> symbols(track.rows());
  std::discrete_distribution<int> draw_noisy(p_noisy.begin(), p_noisy.end());
  std::discrete_distribution<int> draw_voiced(p_voiced.begin(), p_voiced.end());
  for (std::size_t i = 0; i < track.rows(); ++i) {
    const int regime = static_cast<int>((i / kSegment) % 2);
    track.MutableRow(i)[0] = regime;
    symbols[i] = static_cast<MuLawSymbol>(regime == 0 ? draw_noisy(rng) : draw_voiced(rng));
  }
  PcmSignal signal;
  signal.samples = MuLawDecode(symbols);
  const auto trace = ComputeInfoTrace(*model, signal, track);
  double mean[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < trace.size(); ++i) mean[(i / kSegment) % 2] += trace.r_bits[i];
  for (double& m : mean) m /= kSegment * kSegments / 2.0;
  const double separation = mean[0] - mean[1];
  o.Require(std::abs(separation - gap) <= 0.1,
            Fmt("separation %.4f vs constructed gap %.4f", separation, gap));
  o.Note(Fmt("noisy %.4f, structured %.4f, gap %.4f bits", mean[0], mean[1], gap));
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace gvox

int main() {
  using gvox::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "mu-law tables match G.711 reference", 1.0, gvox::MuLawExactness},
      {2, "waveform coder reproduces mu-law transcode", 60.0, gvox::WaveformEquivalence},
      {3, "range coder within 64 bits of ideal", 10.0, gvox::CoderOverhead},
      {4, "mismatch rate equals H(p) + KL(p||q)", 10.0, gvox::MismatchPenalty},
      {5, "R and Hbar concentrate on entropy rate", 30.0, gvox::Concentration},
      {6, "chain rule additivity", 1.0, gvox::ChainRule},
      {7, "gradient check and Markov training", 600.0, gvox::TrainingSanity},
      {8, "parametric bitstream", 10.0, gvox::ParametricBitstream},
      {9, "determinism", 600.0, gvox::Determinism},
      {10, "two-regime information trace", 30.0, gvox::TwoRegimeTrace},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    gvox::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > c.limit_s) {
      outcome.pass = false;
      outcome.detail += "; exceeded time limit";
    }
    failures += !outcome.pass;
    std::printf("%s %d %s (%.2fs of %.0fs): %s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name,
                elapsed, c.limit_s, outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
