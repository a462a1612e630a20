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

// Command line front end. The gvox binary is a thin wrapper around Run so
// the tests can drive every subcommand in-process.

#ifndef GVOX_TOOLS_CLI_H_
#define GVOX_TOOLS_CLI_H_

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gvox/error.h"
#include "gvox/model.h"
#include "gvox/rate_analysis.h"
#include "gvox/signal_io.h"
#include "gvox/wavenet.h"

namespace gvox::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitFormat = 3,
  kExitChecksum = 4,
  kExitIo = 5,
};

int ExitCodeFor(ErrorCode code);

enum class ModelChoice { kWaveNet, kTable };

// Settings shared by train and analyze, read from a flat key=value file.
// Blank lines and lines starting with '#' are ignored.
struct Settings {
  ModelChoice model = ModelChoice::kWaveNet;
  int table_order = 2;
  TrainConfig train;
  std::optional<double> silence_db;
};

// Throws Error(kInvalidArgument) on unknown keys or unparsable values.
Settings ParseSettings(std::istream& in, const std::string& origin);

struct Analysis {
  InfoTrace trace;
  RateReport report;
};

// Rates of `signal` under `model`, conditioned on its own parametric
// encoding. 8 kHz input is upsampled first.
Analysis AnalyzeSignal(const PcmSignal& signal, const ConditionalModel& model,
                       std::optional<double> silence_db);

// Runs one command line (args excludes the program name).
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gvox::cli

#endif  // GVOX_TOOLS_CLI_H_
