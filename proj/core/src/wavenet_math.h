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

#ifndef GVOX_SRC_WAVENET_MATH_H_
#define GVOX_SRC_WAVENET_MATH_H_

#include <algorithm>
#include <cmath>
#include <span>

#include <Eigen/Dense>

#include "gvox/model.h"
#include "gvox/signal_io.h"
#include "gvox/wavenet.h"

namespace gvox::internal {

using ConstMatrix = Eigen::Map<const Eigen::MatrixXd>;
using ConstVector = Eigen::Map<const Eigen::VectorXd>;

inline ConstMatrix ConstMatrixMap(std::span<const double> p, std::size_t off,
                                  int rows, int cols) {
  return ConstMatrix(p.data() + off, rows, cols);
}

inline ConstVector ConstVectorMap(std::span<const double> p, std::size_t off,
                                  int rows) {
  return ConstVector(p.data() + off, rows);
}

inline void Softmax(const double* logits, double* probs) {
  const double peak = *std::max_element(logits, logits + kAlphabetSize);
  double sum = 0.0;
  for (int k = 0; k < kAlphabetSize; ++k) {
    probs[k] = std::exp(logits[k] - peak);
    sum += probs[k];
  }
  for (int k = 0; k < kAlphabetSize; ++k) probs[k] /= sum;
}

Eigen::VectorXd NormalizeTheta(const WaveNetLayout& layout,
                               std::span<const double> params,
                               std::span<const double> theta);

SymbolDistribution HeadDistribution(const WaveNetLayout& layout,
                                    std::span<const double> params,
                                    const Eigen::VectorXd& skip);

}  // namespace gvox::internal

#endif  // GVOX_SRC_WAVENET_MATH_H_
