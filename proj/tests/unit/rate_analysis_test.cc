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
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "gvox/error.h"
#include "gvox/rate_analysis.h"
#include "gvox/table_model.h"
#include "support/markov_oracle.h"
#include "support/signals.h"

namespace gvox {
namespace {

using testing::ConstantTrack;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// Entropy by direct summation in long double, independent of the library.
double OracleEntropy(const std::vector<double>& p) {
  long double h = 0.0L;
  for (double v : p) {
    if (v > 0.0) h -= static_cast<long double>(v) * std::log2(static_cast<long double>(v));
  }
  return static_cast<double>(h);
}

TEST(EntropyTest, ReferenceCases) {
  EXPECT_EQ(ConditionalEntropy(SymbolDistribution::Uniform()), 8.0);
  EXPECT_EQ(ConditionalEntropy(SymbolDistribution::PointMass(200)), 0.0);
  for (auto [a, b] : {std::pair{0, 1}, std::pair{17, 240}, std::pair{3, 255}}) {
    std::array<double, 256> w{};
    w[a] = w[b] = 1.0;
    EXPECT_NEAR(ConditionalEntropy(SymbolDistribution::FromWeights(w)), 1.0, 1e-12);
  }
  const std::vector<double> quarter = {0.25, 0.25, 0.5, 0.0};
  EXPECT_EQ(EntropyBits(quarter), 1.5);
  EXPECT_EQ(EntropyBits(std::vector<double>{}), 0.0);
}

TEST(EntropyTest, BoundsOnRandomDistributions) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::array<double, 256> w{};
    const double sparsity = u(rng);
    for (auto& v : w) v = u(rng) < sparsity ? 0.0 : std::pow(u(rng), 8);
    w[trial % 256] += 1e-3;
    const auto d = SymbolDistribution::FromWeights(w);
    const double h = ConditionalEntropy(d);
    ASSERT_GE(h, 0.0);
    ASSERT_LE(h, 8.0 + 1e-12);
    const auto raw = d.Unfloored();
    ASSERT_NEAR(h, OracleEntropy({raw.begin(), raw.end()}), 1e-9);
  }
}

// Joint pmf over (s-block, theta-block), index s + ns * t.
JointBlockSource Independent(const std::vector<double>& ps, const std::vector<double>& pt,
                             int length) {
  JointBlockSource src;
  src.s_alphabet = static_cast<int>(ps.size());
  src.theta_alphabet = static_cast<int>(pt.size());
  src.block_length = length;
  std::vector<double> bs = {1.0}, bt = {1.0};
  for (int l = 0; l < length; ++l) {
    std::vector<double> ns, nt;
    for (double a : bs) for (double b : ps) ns.push_back(a * b);
    for (double a : bt) for (double b : pt) nt.push_back(a * b);
    bs.swap(ns);
    bt.swap(nt);
  }
  for (double t : bt) for (double s : bs) src.pmf.push_back(s * t);
  return src;
}

TEST(ChainRuleTest, IndependentSourcesDecouple) {
  const std::vector<double> ps = {0.1, 0.2, 0.3, 0.4};
  const std::vector<double> pt = {0.7, 0.2, 0.1};
  const auto rates = ChainRuleCheck(Independent(ps, pt, 3));
  EXPECT_NEAR(rates.conditional, OracleEntropy(ps), 1e-9);
  EXPECT_NEAR(rates.theta, OracleEntropy(pt), 1e-9);
  EXPECT_NEAR(rates.joint, OracleEntropy(ps) + OracleEntropy(pt), 1e-9);
  EXPECT_LE(rates.additivity_error, 1e-9);
}

TEST(ChainRuleTest, CopiedSourceHasNoConditionalEntropy) {
  JointBlockSource src;
  src.s_alphabet = src.theta_alphabet = 4;
  src.block_length = 2;
  std::mt19937_64 rng(1);
  std::vector<double> p(16);
  double total = 0.0;
  for (double& v : p) total += (v = std::uniform_real_distribution<double>(0.1, 1.0)(rng));
  src.pmf.assign(256, 0.0);
  for (int s = 0; s < 16; ++s) src.pmf[s + 16 * s] = p[s] / total;
  const auto rates = ChainRuleCheck(src);
  EXPECT_NEAR(rates.conditional, 0.0, 1e-12);
  EXPECT_NEAR(rates.joint, rates.theta, 1e-12);
}

TEST(ChainRuleTest, RandomJointMatchesEnumerationOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    JointBlockSource src;
    src.s_alphabet = src.theta_alphabet = 4;
    src.block_length = 3;
    const std::size_t ns = 64, nt = 64;
    std::gamma_distribution<double> g(0.3, 1.0);
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
    EXPECT_NEAR(rates.joint, static_cast<double>(joint / 3), 1e-9);
    EXPECT_NEAR(rates.theta, static_cast<double>(theta / 3), 1e-9);
    EXPECT_NEAR(rates.conditional, static_cast<double>(cond / 3), 1e-9);
    EXPECT_LE(rates.additivity_error, 1e-9);
  }
}

TEST(ChainRuleTest, Guards) {
  JointBlockSource big;
  big.s_alphabet = big.theta_alphabet = 16;
  big.block_length = 3;
  EXPECT_EQ(CodeOf([&] { ChainRuleCheck(big); }), ErrorCode::kInvalidArgument);
  auto src = Independent({0.5, 0.5}, {0.5, 0.5}, 1);
  src.pmf[0] += 0.01;
  EXPECT_EQ(CodeOf([&] { ChainRuleCheck(src); }), ErrorCode::kInvalidArgument);
  src.pmf.pop_back();
  EXPECT_EQ(CodeOf([&] { ChainRuleCheck(src); }), ErrorCode::kInvalidArgument);
}

std::unique_ptr<ConditionalModel> UniformModel() {
  ContextTable t;
  t.fallback.fill(1.0);
  return MakeMarkovOracle(0, {t});
}

TEST(InfoTraceTest, UniformModelIsEightEverywhere) {
  const auto signal = testing::SpeechLikeSignal(3000, 1);
  const auto trace = ComputeInfoTrace(*UniformModel(), signal,
                                      ConstantTrack(kConditioningDim, signal.size()));
  ASSERT_EQ(trace.size(), signal.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    ASSERT_EQ(trace.h_bits[i], 8.0);
    ASSERT_EQ(trace.r_bits[i], 8.0);
  }
}

TEST(InfoTraceTest, OracleOnOwnDataConcentrates) {
  std::vector<int> codes;
  for (int c = 0; c < 256; c += 11) codes.push_back(c);
  std::mt19937_64 rng(3);
  testing::Matrix chain(256);
  std::vector<SymbolRow> rows(256);
  for (int s = 0; s < 256; ++s) {
    chain[s] = testing::RandomPmf(rng, codes, 0.4);
    std::copy(chain[s].begin(), chain[s].end(), rows[s].begin());
  }
  const auto model = MakeOrder1Oracle(rows);
  constexpr std::size_t kN = 100000;
  const auto symbols = testing::SampleChain(chain, kN, 4, kMuLawZero);
  const auto trace =
      ComputeInfoTrace(*model, symbols, ConstantTrack(kConditioningDim, kN));
  const auto report = SummarizeTrace(trace, 16000);
  EXPECT_NEAR(report.r, report.h_bar, 0.03);
  EXPECT_NEAR(report.h_bar, testing::EntropyRate(chain), 0.03);
  // r_i is bounded by the floor.
  for (double r : trace.r_bits) ASSERT_LE(r, 16.0 + 1e-9);
}

TEST(InfoTraceTest, TwoRegimesSeparateByTheirEntropyGap) {
  // Regime 0: 64 equiprobable codes (6 bits). Regime 1: 4 codes (2 bits).
  ContextTable noisy, voiced;
  noisy.fallback.fill(0.0);
  voiced.fallback.fill(0.0);
  for (int c = 0; c < 64; ++c) noisy.fallback[c * 4] = 1.0;
  for (int c : {0x10, 0x30, 0x90, 0xB0}) voiced.fallback[c] = 1.0;
  const auto model = MakeMarkovOracle(0, {noisy, voiced}, 1, 0);
  constexpr std::size_t kSegment = 1600, kSegments = 20;
  ConditioningTrack track(1, kSegment * kSegments);
  std::vector<MuLawSymbol> symbols(track.rows());
  std::mt19937_64 rng(5);
  for (std::size_t i = 0; i < track.rows(); ++i) {
    const int regime = static_cast<int>((i / kSegment) % 2);
    track.MutableRow(i)[0] = regime;
    const auto& row = regime == 0 ? noisy.fallback : voiced.fallback;
    std::discrete_distribution<int> draw(row.begin(), row.end());
    symbols[i] = static_cast<MuLawSymbol>(draw(rng));
  }
  const auto trace = ComputeInfoTrace(*model, symbols, track);
  double mean[2] = {0, 0};
  for (std::size_t i = 0; i < trace.size(); ++i) mean[(i / kSegment) % 2] += trace.r_bits[i];
  mean[0] /= kSegment * kSegments / 2.0;
  mean[1] /= kSegment * kSegments / 2.0;
  EXPECT_NEAR(mean[0] - mean[1], 4.0, 0.1);
  // Each segment's own mean sits in its regime.
  for (std::size_t seg = 0; seg < kSegments; ++seg) {
    double h = 0.0;
    for (std::size_t i = seg * kSegment; i < (seg + 1) * kSegment; ++i) h += trace.h_bits[i];
    EXPECT_NEAR(h / kSegment, seg % 2 == 0 ? 6.0 : 2.0, 1e-9) << seg;
  }
}

TEST(InfoTraceTest, AlignmentErrors) {
  const auto model = UniformModel();
  const std::vector<MuLawSymbol> symbols(10, 0);
  EXPECT_EQ(CodeOf([&] { ComputeInfoTrace(*model, symbols, ConstantTrack(kConditioningDim, 9)); }),
            ErrorCode::kAlignment);
  EXPECT_EQ(CodeOf([&] { ComputeInfoTrace(*model, symbols, ConstantTrack(3, 10)); }),
            ErrorCode::kDimensionMismatch);
  const std::vector<bool> mask(9, false);
  EXPECT_EQ(CodeOf([&] {
              ComputeInfoTrace(*model, symbols, ConstantTrack(kConditioningDim, 10), &mask);
            }),
            ErrorCode::kAlignment);
}

TEST(RateReportTest, MeansMatchTraceOverMask) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 8.0);
  InfoTrace trace;
  double h = 0.0, r = 0.0, all_r = 0.0;
  std::size_t counted = 0;
  for (int i = 0; i < 5000; ++i) {
    trace.h_bits.push_back(u(rng));
    trace.r_bits.push_back(2 * u(rng));
    trace.silent.push_back(rng() % 3 == 0);
    all_r += trace.r_bits.back();
    if (!trace.silent.back()) {
      h += trace.h_bits.back();
      r += trace.r_bits.back();
      ++counted;
    }
  }
  const auto report = SummarizeTrace(trace, 8000);
  EXPECT_NEAR(report.h_bar, h / counted, 1e-12);
  EXPECT_NEAR(report.r, r / counted, 1e-12);
  EXPECT_NEAR(report.ideal_bits_total, all_r, 1e-6);
  EXPECT_EQ(report.samples_counted, counted);
  EXPECT_EQ(report.samples_counted + report.silence_excluded, 5000u);
  const auto text = report.ToKeyValue();
  for (const char* key : {"h_bar=", "r=", "h_bar_bps=", "r_bps=", "samples_counted=",
                          "silence_excluded=", "sample_rate_hz=8000"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
  EXPECT_EQ(text.find("payload_bits"), std::string::npos);
}

TEST(RateReportTest, AllSilentGivesZeroRates) {
  InfoTrace trace;
  trace.h_bits = {1, 2};
  trace.r_bits = {3, 4};
  trace.silent = {true, true};
  const auto report = SummarizeTrace(trace, 16000);
  EXPECT_EQ(report.h_bar, 0.0);
  EXPECT_EQ(report.samples_counted, 0u);
  EXPECT_EQ(report.silence_excluded, 2u);
}

TEST(TraceCsvTest, RoundTripToNineDecimals) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 16.0);
  InfoTrace trace;
  for (int i = 0; i < 777; ++i) {
    trace.h_bits.push_back(u(rng) / 2);
    trace.r_bits.push_back(u(rng));
    trace.silent.push_back(i % 7 == 0);
  }
  std::stringstream csv;
  ExportTrace(trace, csv);
  const std::string text = csv.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), 778u);
  const auto parsed = ParseTraceCsv(csv);
  ASSERT_EQ(parsed.size(), trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    ASSERT_NEAR(parsed.h_bits[i], trace.h_bits[i], 1e-9);
    ASSERT_NEAR(parsed.r_bits[i], trace.r_bits[i], 1e-9);
    ASSERT_EQ(parsed.silent[i], trace.silent[i]);
  }
}

TEST(TraceCsvTest, EmptyTraceIsHeaderOnly) {
  std::stringstream csv;
  ExportTrace(InfoTrace{}, csv);
  EXPECT_EQ(csv.str(), "index,h_bits,r_bits,silent_flag\n");
  EXPECT_EQ(ParseTraceCsv(csv).size(), 0u);
}

TEST(TraceCsvTest, FileAndErrors) {
  testing::TempDir dir;
  InfoTrace trace;
  trace.h_bits = {1.0};
  trace.r_bits = {2.5};
  ExportTrace(trace, dir / "t.csv");
  std::ifstream in(dir / "t.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(row, "0,1.000000000,2.500000000,0");
  EXPECT_EQ(CodeOf([&] { ExportTrace(trace, dir / "missing" / "t.csv"); }), ErrorCode::kIo);
  std::stringstream bad("index,h,r\n");
  EXPECT_EQ(CodeOf([&] { ParseTraceCsv(bad); }), ErrorCode::kMalformedHeader);
  std::stringstream gap("index,h_bits,r_bits,silent_flag\n1,0,0,0\n");
  EXPECT_EQ(CodeOf([&] { ParseTraceCsv(gap); }), ErrorCode::kMalformedHeader);
}

}  // namespace
}  // namespace gvox
