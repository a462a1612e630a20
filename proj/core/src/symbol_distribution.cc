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
#include <limits>

#include "gvox/error.h"
#include "gvox/model.h"

namespace gvox {
namespace {

constexpr double kFloorScale = 1.0 - kAlphabetSize * kProbFloor;

}  // namespace

SymbolDistribution SymbolDistribution::FromWeights(std::span<const double> weights) {
  if (weights.size() != kAlphabetSize) {
    throw Error(ErrorCode::kDimensionMismatch,
                "distribution needs 256 weights, got " +
                    std::to_string(weights.size()));
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "negative or non-finite weight");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::kInvalidArgument, "zero total weight");

  SymbolDistribution d;
  double min_p = 1.0;
  for (int s = 0; s < kAlphabetSize; ++s) {
    d.probs_[s] = weights[s] / sum;
    min_p = std::min(min_p, d.probs_[s]);
  }
  if (min_p < kProbFloor * (1.0 - 1e-9)) {  // already floored input passes through
    for (double& p : d.probs_) p = kProbFloor + kFloorScale * p;
    d.floored_ = true;
  }
  return d;
}

std::array<double, kAlphabetSize> SymbolDistribution::Unfloored() const {
  if (!floored_) return probs_;
  std::array<double, kAlphabetSize> p;
  for (int s = 0; s < kAlphabetSize; ++s) {
    p[s] = std::max(0.0, (probs_[s] - kProbFloor) / kFloorScale);
  }
  return p;
}

SymbolDistribution SymbolDistribution::Uniform() {
  SymbolDistribution d;
  d.probs_.fill(1.0 / kAlphabetSize);
  return d;
}

SymbolDistribution SymbolDistribution::PointMass(MuLawSymbol symbol) {
  std::array<double, kAlphabetSize> w{};
  w[symbol] = 1.0;
  return FromWeights(w);
}

MuLawSymbol SampleSymbol(const SymbolDistribution& dist, Rng& rng,
                         double temperature) {
  const auto p = dist.Unfloored();
  if (!(temperature >= kArgmaxTemperature)) {
    return static_cast<MuLawSymbol>(
        std::max_element(p.begin(), p.end()) - p.begin());
  }
  std::array<double, kAlphabetSize> w;
  if (temperature == 1.0) {
    w = p;
  } else {
    double max_log = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < kAlphabetSize; ++s) {
      w[s] = std::log(p[s]) / temperature;
      max_log = std::max(max_log, w[s]);
    }
    for (double& v : w) v = std::exp(v - max_log);
  }
  double total = 0.0;
  for (double v : w) total += v;
  const double u = rng.Uniform() * total;
  double cum = 0.0;
  int last_positive = 0;
  for (int s = 0; s < kAlphabetSize; ++s) {
    if (w[s] <= 0.0) continue;
    cum += w[s];
    last_positive = s;
    if (u < cum) return static_cast<MuLawSymbol>(s);
  }
  return static_cast<MuLawSymbol>(last_positive);
}

}  // namespace gvox
