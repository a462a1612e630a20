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

#include "gvox/rate_analysis.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gvox/error.h"

namespace gvox {

double EntropyBits(std::span<const double> pmf) {
  double h = 0.0;
  for (double p : pmf) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

double ConditionalEntropy(const SymbolDistribution& dist) {
  return EntropyBits(dist.Unfloored());
}

RateReport SummarizeTrace(const InfoTrace& trace, int sample_rate_hz) {
  RateReport report;
  report.sample_rate_hz = sample_rate_hz;
  double h = 0.0, r = 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    report.ideal_bits_total += trace.r_bits[i];
    if (i < trace.silent.size() && trace.silent[i]) {
      ++report.silence_excluded;
      continue;
    }
    h += trace.h_bits[i];
    r += trace.r_bits[i];
    ++report.samples_counted;
  }
  if (report.samples_counted > 0) {
    report.h_bar = h / static_cast<double>(report.samples_counted);
    report.r = r / static_cast<double>(report.samples_counted);
  }
  return report;
}

std::string RateReport::ToKeyValue() const {
  std::ostringstream out;
  char buf[64];
  auto put = [&](const char* key, double value) {
    std::snprintf(buf, sizeof(buf), "%.9f", value);
    out << key << '=' << buf << '\n';
  };
  put("h_bar", h_bar);
  put("h_bar_bps", h_bar * sample_rate_hz);
  put("r", r);
  put("r_bps", r * sample_rate_hz);
  if (generation_rate) {
    put("generation_rate", *generation_rate);
    put("generation_rate_bps", *generation_rate * sample_rate_hz);
  }
  if (payload_bits) out << "payload_bits=" << *payload_bits << '\n';
  if (payload_bits_per_sample) {
    put("payload_bits_per_sample", *payload_bits_per_sample);
    put("payload_bps", *payload_bits_per_sample * sample_rate_hz);
  }
  put("ideal_bits_total", ideal_bits_total);
  out << "samples_counted=" << samples_counted << '\n';
  out << "silence_excluded=" << silence_excluded << '\n';
  out << "sample_rate_hz=" << sample_rate_hz << '\n';
  return out.str();
}

InfoTrace ComputeInfoTrace(const ConditionalModel& model,
                           std::span<const MuLawSymbol> symbols,
                           const ConditioningTrack& track,
                           const std::vector<bool>* silent) {
  if (track.dim() != model.conditioning_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "conditioning dim " + std::to_string(track.dim()) +
                    ", model expects " + std::to_string(model.conditioning_dim()));
  }
  if (track.rows() < symbols.size()) {
    throw Error(ErrorCode::kAlignment,
                std::to_string(track.rows()) + " conditioning rows for " +
                    std::to_string(symbols.size()) + " samples");
  }
  if (silent != nullptr && silent->size() != symbols.size()) {
    throw Error(ErrorCode::kAlignment, "silence mask length differs from signal");
  }
  InfoTrace trace;
  trace.h_bits.resize(symbols.size());
  trace.r_bits.resize(symbols.size());
  trace.silent = silent ? *silent : std::vector<bool>(symbols.size(), false);
  auto session = model.NewSession();
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const SymbolDistribution q = session->NextDistribution(track.Row(i));
    trace.h_bits[i] = ConditionalEntropy(q);
    trace.r_bits[i] = -std::log2(q[symbols[i]]);
    session->Advance(symbols[i]);
  }
  return trace;
}

InfoTrace ComputeInfoTrace(const ConditionalModel& model,
                           const PcmSignal& signal,
                           const ConditioningTrack& track,
                           const std::vector<bool>* silent) {
  const auto symbols = MuLawEncode(signal.samples);
  return ComputeInfoTrace(model, std::span<const MuLawSymbol>(symbols), track,
                          silent);
}

void ExportTrace(const InfoTrace& trace, std::ostream& out) {
  out << "index,h_bits,r_bits,silent_flag\n";
  char buf[96];
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const bool silent = i < trace.silent.size() && trace.silent[i];
    std::snprintf(buf, sizeof(buf), "%zu,%.9f,%.9f,%d\n", i, trace.h_bits[i],
                  trace.r_bits[i], silent ? 1 : 0);
    out << buf;
  }
}

void ExportTrace(const InfoTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  ExportTrace(trace, out);
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

InfoTrace ParseTraceCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "index,h_bits,r_bits,silent_flag") {
    throw Error(ErrorCode::kMalformedHeader, "not a trace CSV");
  }
  InfoTrace trace;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t index = 0;
    double h = 0.0, r = 0.0;
    int flag = 0;
    if (std::sscanf(line.c_str(), "%zu,%lf,%lf,%d", &index, &h, &r, &flag) != 4 ||
        index != row || (flag != 0 && flag != 1)) {
      throw Error(ErrorCode::kMalformedHeader,
                  "bad trace row " + std::to_string(row + 1));
    }
    trace.h_bits.push_back(h);
    trace.r_bits.push_back(r);
    trace.silent.push_back(flag == 1);
    ++row;
  }
  return trace;
}

ChainRuleRates ChainRuleCheck(const JointBlockSource& source) {
  if (source.s_alphabet < 1 || source.theta_alphabet < 1 ||
      source.block_length < 1) {
    throw Error(ErrorCode::kInvalidArgument, "alphabets and block length must be positive");
  }
  double s_states = 1.0, theta_states = 1.0;
  for (int i = 0; i < source.block_length; ++i) {
    s_states *= source.s_alphabet;
    theta_states *= source.theta_alphabet;
  }
  if (s_states * theta_states > static_cast<double>(kMaxJointStates)) {
    throw Error(ErrorCode::kInvalidArgument,
                "joint state space too large for enumeration");
  }
  const auto ns = static_cast<std::size_t>(s_states);
  const auto nt = static_cast<std::size_t>(theta_states);
  if (source.pmf.size() != ns * nt) {
    throw Error(ErrorCode::kInvalidArgument,
                "joint pmf needs " + std::to_string(ns * nt) + " entries, got " +
                    std::to_string(source.pmf.size()));
  }
  double total = 0.0;
  for (double p : source.pmf) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kInvalidArgument, "joint pmf has a negative entry");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "joint pmf does not sum to 1");
  }

  ChainRuleRates rates;
  rates.joint = EntropyBits(source.pmf);
  std::vector<double> conditional(ns);
  for (std::size_t t = 0; t < nt; ++t) {
    const double* row = source.pmf.data() + t * ns;
    double marginal = 0.0;
    for (std::size_t s = 0; s < ns; ++s) marginal += row[s];
    if (marginal <= 0.0) continue;
    for (std::size_t s = 0; s < ns; ++s) conditional[s] = row[s] / marginal;
    rates.theta -= marginal * std::log2(marginal);
    rates.conditional += marginal * EntropyBits(conditional);
  }
  const double l = source.block_length;
  rates.joint /= l;
  rates.conditional /= l;
  rates.theta /= l;
  rates.additivity_error = std::abs(rates.joint - rates.conditional - rates.theta);
  return rates;
}

}  // namespace gvox
