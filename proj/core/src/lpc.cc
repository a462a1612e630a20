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

#include "gvox/lpc.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace gvox {
namespace {

constexpr int kHalfOrder = kLpcOrder / 2;
constexpr int kGridPoints = 2048;
constexpr int kBisections = 48;

// Symmetric degree-p polynomial c(z) evaluated on the unit circle, with the
// linear phase removed: 2 sum_{k<p/2} c_k cos((p/2 - k) w) + c_{p/2}.
double EvalSymmetric(const std::array<double, kLpcOrder + 1>& c, double w) {
  double v = c[kHalfOrder];
  for (int k = 0; k < kHalfOrder; ++k) {
    v += 2.0 * c[k] * std::cos((kHalfOrder - k) * w);
  }
  return v;
}

std::vector<double> RootsOnGrid(const std::array<double, kLpcOrder + 1>& c) {
  std::vector<double> roots;
  double prev_w = 0.0;
  double prev_v = EvalSymmetric(c, prev_w);
  for (int i = 1; i <= kGridPoints; ++i) {
    const double w = std::numbers::pi * i / kGridPoints;
    const double v = EvalSymmetric(c, w);
    if (prev_v == 0.0) {
      if (prev_w > 0.0) roots.push_back(prev_w);
    } else if ((prev_v < 0.0) != (v < 0.0) && v != 0.0) {
      double lo = prev_w, hi = w, vlo = prev_v;
      for (int it = 0; it < kBisections; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double vm = EvalSymmetric(c, mid);
        if ((vm < 0.0) == (vlo < 0.0)) {
          lo = mid;
          vlo = vm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_w = w;
    prev_v = v;
  }
  return roots;
}

// Multiplies `poly` (coefficients in z^-1) by (1 + b z^-1 + z^-2).
void MultiplyQuadratic(std::vector<double>* poly, double b) {
  std::vector<double> out(poly->size() + 2, 0.0);
  for (std::size_t i = 0; i < poly->size(); ++i) {
    out[i] += (*poly)[i];
    out[i + 1] += b * (*poly)[i];
    out[i + 2] += (*poly)[i];
  }
  *poly = std::move(out);
}

}  // namespace

std::vector<double> Autocorrelation(std::span<const double> x, int max_lag) {
  std::vector<double> r(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t n = static_cast<std::size_t>(lag); n < x.size(); ++n) {
      acc += x[n] * x[n - lag];
    }
    r[lag] = acc;
  }
  return r;
}

bool LevinsonDurbin(std::span<const double> r, LpcCoefficients* a,
                    double* prediction_error) {
  a->fill(0.0);
  (*a)[0] = 1.0;
  if (r.size() < kLpcOrder + 1 || !(r[0] > 0.0)) {
    if (prediction_error) *prediction_error = r.empty() ? 0.0 : r[0];
    return false;
  }
  LpcCoefficients tmp{};
  double err = r[0];
  for (int i = 1; i <= kLpcOrder; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc += (*a)[j] * r[i - j];
    const double k = -acc / err;
    if (!(std::abs(k) < 1.0)) {
      a->fill(0.0);
      (*a)[0] = 1.0;
      if (prediction_error) *prediction_error = r[0];
      return false;
    }
    tmp = *a;
    for (int j = 1; j < i; ++j) (*a)[j] = tmp[j] + k * tmp[i - j];
    (*a)[i] = k;
    err *= 1.0 - k * k;
  }
  if (prediction_error) *prediction_error = err;
  return true;
}

LineSpectralFrequencies FlatLsf() {
  LineSpectralFrequencies lsf{};
  for (int k = 0; k < kLpcOrder; ++k) {
    lsf[k] = std::numbers::pi * (k + 1) / (kLpcOrder + 1);
  }
  return lsf;
}

bool LpcToLsf(const LpcCoefficients& a, LineSpectralFrequencies* lsf) {
  // P(z) = A(z) + z^-(p+1) A(1/z), Q(z) = A(z) - z^-(p+1) A(1/z), with the
  // trivial roots at z = -1 (P) and z = +1 (Q) divided out.
  std::array<double, kLpcOrder + 2> p{}, q{};
  for (int k = 0; k <= kLpcOrder + 1; ++k) {
    const double fwd = k <= kLpcOrder ? a[k] : 0.0;
    const double rev = k >= 1 ? a[kLpcOrder + 1 - k] : 0.0;
    p[k] = fwd + rev;
    q[k] = fwd - rev;
  }
  std::array<double, kLpcOrder + 1> ps{}, qs{};
  ps[0] = p[0];
  qs[0] = q[0];
  for (int k = 1; k <= kLpcOrder; ++k) {
    ps[k] = p[k] - ps[k - 1];
    qs[k] = q[k] + qs[k - 1];
  }
  const auto p_roots = RootsOnGrid(ps);
  const auto q_roots = RootsOnGrid(qs);
  if (p_roots.size() != kHalfOrder || q_roots.size() != kHalfOrder) {
    *lsf = FlatLsf();
    return false;
  }
  for (int k = 0; k < kHalfOrder; ++k) {
    (*lsf)[2 * k] = p_roots[k];
    (*lsf)[2 * k + 1] = q_roots[k];
  }
  // Interlacing is what makes the result a valid LSF vector.
  for (int k = 1; k < kLpcOrder; ++k) {
    if (!((*lsf)[k] > (*lsf)[k - 1])) {
      *lsf = FlatLsf();
      return false;
    }
  }
  return true;
}

LpcCoefficients LsfToLpc(const LineSpectralFrequencies& lsf) {
  std::vector<double> ps{1.0}, qs{1.0};
  for (int k = 0; k < kHalfOrder; ++k) {
    MultiplyQuadratic(&ps, -2.0 * std::cos(lsf[2 * k]));
    MultiplyQuadratic(&qs, -2.0 * std::cos(lsf[2 * k + 1]));
  }
  // Restore the trivial roots: P = ps (1 + z^-1), Q = qs (1 - z^-1).
  LpcCoefficients a{};
  for (int k = 0; k <= kLpcOrder; ++k) {
    const double pk = ps[k] + (k >= 1 ? ps[k - 1] : 0.0);
    const double qk = qs[k] - (k >= 1 ? qs[k - 1] : 0.0);
    a[k] = 0.5 * (pk + qk);
  }
  return a;
}

double EnvelopeMagnitude(const LpcCoefficients& a, double omega) {
  std::complex<double> acc = 0.0;
  for (int k = 0; k <= kLpcOrder; ++k) {
    acc += a[k] * std::polar(1.0, -omega * k);
  }
  return 1.0 / std::abs(acc);
}

}  // namespace gvox
