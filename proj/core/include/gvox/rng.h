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

#ifndef GVOX_RNG_H_
#define GVOX_RNG_H_

#include <cstdint>
#include <random>

namespace gvox {

// Platform-independent random source. The engine is std::mt19937_64, whose
// output sequence is fixed by the C++ standard; the conversions below are
// ours (the std distributions are implementation-defined) so seeded results
// are identical across compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();

  // Uniform integer in [0, n), n > 0.
  std::uint64_t UniformInt(std::uint64_t n);

  // Standard normal via Box-Muller (no cached second value).
  double Gaussian();

 private:
  std::mt19937_64 engine_;
};

}  // namespace gvox

#endif  // GVOX_RNG_H_
