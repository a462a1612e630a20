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

#ifndef GVOX_LPC_H_
#define GVOX_LPC_H_

#include <array>
#include <span>
#include <vector>

namespace gvox {

inline constexpr int kLpcOrder = 10;

// Predictor polynomial A(z) = 1 + a[1] z^-1 + ... + a[p] z^-p, stored with
// a[0] == 1.
using LpcCoefficients = std::array<double, kLpcOrder + 1>;
using LineSpectralFrequencies = std::array<double, kLpcOrder>;

std::vector<double> Autocorrelation(std::span<const double> x, int max_lag);

// Solves the normal equations for the given autocorrelation sequence.
// Returns false (and a flat predictor) when r[0] is not positive or the
// recursion becomes unstable.
bool LevinsonDurbin(std::span<const double> r, LpcCoefficients* a,
                    double* prediction_error = nullptr);

// Roots of the symmetric and antisymmetric LSP polynomials, in (0, pi),
// strictly increasing. Returns false if fewer than kLpcOrder roots were found
// (A(z) not minimum phase); lsf is then set to the flat-spectrum default.
bool LpcToLsf(const LpcCoefficients& a, LineSpectralFrequencies* lsf);
LpcCoefficients LsfToLpc(const LineSpectralFrequencies& lsf);

// LSFs of A(z) = 1: uniformly spaced k*pi/(p+1).
LineSpectralFrequencies FlatLsf();

// |1 / A(e^{jw})|.
double EnvelopeMagnitude(const LpcCoefficients& a, double omega);

}  // namespace gvox

#endif  // GVOX_LPC_H_
