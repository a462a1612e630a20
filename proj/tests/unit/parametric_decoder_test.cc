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

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "gvox/error.h"
#include "gvox/lpc.h"
#include "gvox/parametric.h"
#include "gvox/parametric_decoder.h"
#include "gvox/table_model.h"
#include "gvox/wavenet.h"
#include "support/lsf_oracle.h"
#include "support/markov_oracle.h"
#include "support/signals.h"
#include "support/spectrum.h"

namespace gvox {
namespace {

using testing::Matrix;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

std::unique_ptr<ConditionalModel> ConstantModel(MuLawSymbol symbol) {
  ContextTable t;
  t.fallback.fill(0.0);
  t.fallback[symbol] = 1.0;
  return MakeMarkovOracle(0, {t});
}

std::unique_ptr<ConditionalModel> UniformModel() {
  ContextTable t;
  t.fallback.fill(1.0);
  return MakeMarkovOracle(0, {t});
}

std::vector<std::uint8_t> Bitstream(std::size_t frames, std::uint64_t seed) {
  return PackStream(EncodeParametric(testing::SpeechLikeSignal(frames * 320, seed)));
}

TEST(SynthesizeTest, PointMassGivesConstantOutput) {
  const auto model = ConstantModel(0xA5);
  const auto out = Synthesize(Bitstream(10, 1), *model);
  ASSERT_EQ(out.size(), 3200u);
  EXPECT_EQ(out.sample_rate_hz, 16000);
  for (auto v : out.samples) ASSERT_EQ(v, MuLawDecode(0xA5));
}

TEST(SynthesizeTest, SameSeedSameOutput) {
  WaveNetConfig c;
  c.residual_channels = 6;
  c.skip_channels = 8;
  c.stacks = 1;
  c.layers_per_stack = 3;
  const WaveNetModel model(InitWeights(c, 5));
  const auto bits = Bitstream(6, 2);
  SynthesisOptions options;
  options.seed = 42;
  const auto a = Synthesize(bits, model, options);
  const auto b = Synthesize(bits, model, options);
  EXPECT_EQ(a, b);
  options.seed = 43;
  EXPECT_NE(Synthesize(bits, model, options), a);
  options.temperature = 0.0;
  EXPECT_EQ(Synthesize(bits, model, options), Synthesize(bits, model, options));
}

TEST(SynthesizeTest, OutputIsOnTheMuLawGrid) {
  const auto out = Synthesize(Bitstream(4, 3), *UniformModel());
  ASSERT_EQ(out.size(), 4u * 320);
  for (auto v : out.samples) ASSERT_EQ(MuLawDecode(MuLawEncode(v)), v);
}

TEST(SynthesizeTest, Errors) {
  auto bits = Bitstream(3, 1);
  bits[0] = 'X';
  EXPECT_EQ(CodeOf([&] { Synthesize(bits, *UniformModel()); }), ErrorCode::kBadMagic);
  ContextTable t;
  t.fallback.fill(1.0);
  const auto narrow = MakeMarkovOracle(0, {t}, 5);
  EXPECT_EQ(CodeOf([&] { Synthesize(Bitstream(3, 1), *narrow); }), ErrorCode::kDimensionMismatch);
  SynthesisOptions options;
  options.temperature = -1.0;
  EXPECT_EQ(CodeOf([&] { Synthesize(Bitstream(3, 1), *UniformModel(), options); }),
            ErrorCode::kInvalidArgument);
  EXPECT_TRUE(Synthesize(PackStream({}), *UniformModel()).samples.empty());
}

TEST(GenerationRateTest, UniformAndPointMass) {
  SynthesisTrace trace;
  Synthesize(Bitstream(5, 1), *UniformModel(), {}, &trace);
  ASSERT_EQ(trace.h_bits.size(), 1600u);
  EXPECT_EQ(GenerationRate(trace), 8.0);
  Synthesize(Bitstream(5, 1), *ConstantModel(3), {}, &trace);
  EXPECT_EQ(GenerationRate(trace), 0.0);
}

TEST(GenerationRateTest, SkipsWarmupAndSilence) {
  SynthesisTrace trace;
  trace.h_bits.assign(400, 1.0);
  for (std::size_t i = 0; i < kWarmupSamples16k; ++i) trace.h_bits[i] = 100.0;
  trace.h_bits[300] = 50.0;
  std::vector<bool> silent(400, false);
  silent[300] = true;
  EXPECT_EQ(GenerationRate(trace, &silent), 1.0);
  silent.pop_back();
  EXPECT_EQ(CodeOf([&] { GenerationRate(trace, &silent); }), ErrorCode::kAlignment);
}

TEST(GenerationRateTest, MarkovOracleMatchesClosedForm) {
  std::vector<int> codes;
  for (int c = 0; c < 256; c += 13) codes.push_back(c);
  std::mt19937_64 rng(9);
  Matrix chain(256);
  std::vector<SymbolRow> rows(256);
  for (int s = 0; s < 256; ++s) {
    chain[s] = testing::RandomPmf(rng, codes, 0.5);
    std::copy(chain[s].begin(), chain[s].end(), rows[s].begin());
  }
  const auto model = MakeOrder1Oracle(rows);
  const auto track = testing::ConstantTrack(kConditioningDim, 100000 + kWarmupSamples16k);
  SynthesisTrace trace;
  SynthesizeFromTrack(track, *model, {}, &trace);
  EXPECT_NEAR(GenerationRate(trace), testing::EntropyRate(chain), 0.03);
}

// Noise whose level follows the conditioning power entry sample by sample.
PcmSignal NoiseFollowingPower(const ConditioningTrack& track, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  PcmSignal s;
  s.samples.resize(track.rows());
  for (std::size_t i = 0; i < track.rows(); ++i) {
    const double level = 32768.0 * std::pow(10.0, track.Row(i)[11] / 20.0);
    s.samples[i] = static_cast<std::int16_t>(std::clamp(std::round(level * g(rng)), -32768.0, 32767.0));
  }
  return s;
}

// Frames with a random-walk power between -50 and -10 dB.
std::vector<PackedFrame> PowerWalk(std::size_t frames, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> step(-3.0, 3.0);
  std::vector<PackedFrame> out;
  double level = -25.0;
  for (std::size_t f = 0; f < frames; ++f) {
    level = std::clamp(level + step(rng), -50.0, -10.0);
    FrameParams p;
    p.power_db = level;
    out.push_back(QuantizeFrame(p));
  }
  return out;
}

TEST(SynthesizeTest, TrainedModelTracksCodedPower) {
  std::mt19937_64 rng(2024);
  std::vector<TrainingExample> corpus;
  for (int i = 0; i < 6; ++i) {
    const auto frames = PowerWalk(100, rng);
    TrainingExample ex;
    ex.track = ConditioningFromStream(UnpackStream(PackStream(frames)), 16000);
    ex.signal = NoiseFollowingPower(ex.track, rng);
    corpus.push_back(std::move(ex));
  }
  TrainConfig config;
  config.architecture.residual_channels = 8;
  config.architecture.skip_channels = 16;
  config.architecture.stacks = 1;
  config.architecture.layers_per_stack = 2;
  config.steps = 800;
  config.learning_rate = 1.0;
  config.seed = 3;
  const WaveNetModel model(Train(corpus, config).weights);

  const auto frames = PowerWalk(100, rng);
  SynthesisOptions options;
  options.seed = 11;
  const auto out = Synthesize(PackStream(frames), model, options);
  ASSERT_EQ(out.size(), 100u * 320);
  // Each 10 ms conditioning interval against the power it carries.
  const auto track = ConditioningFromStream(UnpackStream(PackStream(frames)), 16000);
  int within = 0;
  constexpr int kIntervals = 200;
  for (std::size_t k = 0; k < kIntervals; ++k) {
    const double coded = track.Row(k * 160)[11];
    const double measured = testing::RmsDb(std::span(out.samples).subspan(k * 160, 160));
    within += std::abs(measured - coded) <= 3.0;
  }
  EXPECT_GE(within, kIntervals * 9 / 10) << within << " of " << kIntervals;
}

// Renderer.

FrameParams UnvoicedFrame(const std::vector<double>& poly, double power_db) {
  LpcCoefficients a{};
  for (std::size_t k = 0; k < poly.size(); ++k) a[k] = poly[k];
  FrameParams p;
  if (!LpcToLsf(a, &p.lsf)) ADD_FAILURE() << "unstable test filter";
  p.power_db = power_db;
  return DequantizeFrame(QuantizeFrame(p));
}

// 1/|A(e^jw)|^2 from the LSFs, by direct evaluation of the polynomial.
double EnvelopePower(const LineSpectralFrequencies& lsf, double hz) {
  const auto a = LsfToLpc(lsf);
  std::complex<double> sum = 0.0;
  for (int k = 0; k <= kLpcOrder; ++k) {
    sum += a[k] * std::polar(1.0, -2.0 * std::numbers::pi * hz / 8000.0 * k);
  }
  return 1.0 / std::norm(sum);
}

TEST(RenderSinusoidalTest, UnvoicedSpectrumFollowsEnvelope) {
  const auto poly = testing::ResonatorPolynomial({{600, 150}, {1700, 200}, {2800, 300}}, 8000);
  const auto frame = UnvoicedFrame(poly, -20.0);
  const std::vector<FrameParams> frames(200, frame);
  const auto out = RenderSinusoidalFrames(frames, 4);
  ASSERT_EQ(out.size(), 200u * 160);
  EXPECT_EQ(out.sample_rate_hz, 8000);
  const auto psd = testing::WelchPsd(testing::ToDouble(out.samples), 256, 8000);
  // 250 Hz bands from 125 Hz to 3875 Hz.
  std::vector<double> diff;
  for (int band = 0; band < 15; ++band) {
    double measured = 0.0, expected = 0.0;
    int n = 0;
    for (int k = 4 + 8 * band; k < 12 + 8 * band; ++k, ++n) {
      measured += psd[k];
      expected += EnvelopePower(frame.lsf, k * 31.25);
    }
    diff.push_back(10 * std::log10(measured / n) - 10 * std::log10(expected / n));
  }
  const double offset = std::accumulate(diff.begin(), diff.end(), 0.0) / diff.size();
  for (std::size_t b = 0; b < diff.size(); ++b) EXPECT_NEAR(diff[b], offset, 3.0) << b;
}

TEST(RenderSinusoidalTest, VoicedFramesHaveHarmonicPeaks) {
  FrameParams p;
  p.voicing = 3;
  p.pitch_hz = 100.0;
  p.power_db = -15.0;
  const auto frame = DequantizeFrame(QuantizeFrame(p));
  ASSERT_NEAR(frame.pitch_hz, 100.0, 1.0);
  const std::vector<FrameParams> frames(100, frame);
  const auto out = RenderSinusoidalFrames(frames, 1);
  const auto x = testing::ToDouble(out.samples);
  for (int k = 1; k <= 20; ++k) {
    const double on = testing::ToneAmplitude(x, k * frame.pitch_hz, 8000);
    const double off = testing::ToneAmplitude(x, (k + 0.5) * frame.pitch_hz, 8000);
    EXPECT_GT(20 * std::log10(on / off), 20.0) << k;
  }
}

TEST(RenderSinusoidalTest, ZeroPowerIsNearSilent) {
  FrameParams p;
  p.power_db = kMinPowerDb;
  const std::vector<FrameParams> frames(20, p);
  const auto out = RenderSinusoidalFrames(frames, 1);
  EXPECT_LE(testing::RmsDb(out.samples), -55.0);
}

TEST(RenderSinusoidalTest, FramePowerWithinOneDb) {
  const auto bits = Bitstream(50, 6);
  const auto stream = UnpackStream(bits);
  const auto out = RenderSinusoidal(bits, 3);
  ASSERT_EQ(out.size(), stream.frames.size() * 160);
  for (std::size_t f = 0; f < stream.frames.size(); ++f) {
    const double coded = DequantizeFrame(stream.frames[f]).power_db;
    if (coded <= -50.0) continue;  // below a few LSBs rounding dominates
    EXPECT_NEAR(testing::RmsDb(std::span(out.samples).subspan(f * 160, 160)), coded, 1.0) << f;
  }
  EXPECT_EQ(RenderSinusoidal(bits, 3), out);
}

TEST(RenderSinusoidalTest, CutoffLevels) {
  EXPECT_EQ(VoicedCutoffHz(0), 0.0);
  EXPECT_EQ(VoicedCutoffHz(3), 4000.0);
  EXPECT_EQ(CodeOf([] { VoicedCutoffHz(4); }), ErrorCode::kInvalidArgument);
  EXPECT_TRUE(RenderSinusoidal(PackStream({})).samples.empty());
}

}  // namespace
}  // namespace gvox
