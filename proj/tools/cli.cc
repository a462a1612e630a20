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

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "gvox/parametric.h"
#include "gvox/parametric_decoder.h"
#include "gvox/table_model.h"
#include "gvox/waveform_coder.h"

namespace gvox::cli {
namespace {

namespace fs = std::filesystem;

// The stage a command is in, reported alongside any error.
struct Stage {
  std::string where;
  void Set(std::string text) { where = std::move(text); }
};

std::vector<std::uint8_t> ReadBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "read failed: " + path.string());
  return bytes;
}

void WriteBytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

PcmSignal ToWideband(const PcmSignal& signal) {
  return signal.sample_rate_hz == kWidebandRate ? signal : Resample(signal, kWidebandRate);
}

// Conditioning rebuilt from the transmitted parameters, as a decoder sees it.
ConditioningTrack TrackFor(const PcmSignal& signal) {
  return ConditioningFromStream(UnpackStream(PackStream(EncodeParametric(signal))),
                                kWidebandRate);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto result = std::from_chars(text.data(), end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw Error(ErrorCode::kInvalidArgument, "bad value for " + key + ": '" + text + "'");
  }
  return value;
}

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

Settings LoadSettings(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return ParseSettings(in, path);
}

std::unique_ptr<ConditionalModel> LoadWeights(const std::string& path, Stage& stage) {
  stage.Set("loading weights " + path);
  return LoadModelFile(path);
}

void PutValue(std::ostream& out, const char* key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", value);
  out << key << '=' << buf << '\n';
}

int EncodeParametricCommand(const std::string& input, const std::string& output,
                            std::ostream& out, Stage& stage) {
  stage.Set("reading " + input);
  const auto signal = ReadWav(input);
  stage.Set("analyzing " + input);
  EncoderStats stats;
  const auto frames = EncodeParametric(signal, &stats);
  stage.Set("writing " + output);
  const auto bytes = PackStream(frames);
  WriteBytes(output, bytes);
  out << "frames=" << frames.size() << '\n'
      << "payload_bits=" << frames.size() * kFrameBits << '\n'
      << "file_bytes=" << bytes.size() << '\n'
      << "clamped_lsf=" << stats.clamped_lsf << '\n'
      << "clamped_pitch=" << stats.clamped_pitch << '\n'
      << "clamped_power=" << stats.clamped_power << '\n';
  return kExitOk;
}

struct DecodeParametricFlags {
  std::string input, output, weights;
  std::uint64_t seed = 1;
  double temperature = 1.0;
  bool fallback = false;
};

int DecodeParametricCommand(const DecodeParametricFlags& f, std::ostream& out,
                            std::ostream& err, Stage& stage) {
  if (f.weights.empty() && !f.fallback) {
    err << "gvox decode-parametric: --weights is required unless --fallback-sinusoidal is set\n";
    return kExitUsage;
  }
  stage.Set("reading " + f.input);
  const auto bits = ReadBytes(f.input);
  PcmSignal signal;
  if (f.fallback) {
    stage.Set("rendering " + f.input);
    signal = RenderSinusoidal(bits, f.seed);
  } else {
    const auto model = LoadWeights(f.weights, stage);
    stage.Set("synthesizing " + f.input);
    SynthesisOptions options;
    options.seed = f.seed;
    options.temperature = f.temperature;
    SynthesisTrace trace;
    signal = Synthesize(bits, *model, options, &trace);
    PutValue(out, "generation_rate", GenerationRate(trace));
  }
  stage.Set("writing " + f.output);
  WriteWav(signal, f.output);
  out << "samples=" << signal.size() << '\n' << "sample_rate_hz=" << signal.sample_rate_hz << '\n';
  return kExitOk;
}

struct EncodeWaveformFlags {
  std::string input, output, weights;
  int levels = kAlphabetSize;
  std::optional<double> silence_db;
};

int EncodeWaveformCommand(const EncodeWaveformFlags& f, std::ostream& out, Stage& stage) {
  const auto model = LoadWeights(f.weights, stage);
  stage.Set("reading " + f.input);
  const auto signal = ReadWav(f.input);
  stage.Set("encoding " + f.input);
  const auto frames = EncodeParametric(signal);
  WaveformEncodeOptions options;
  options.quantizer.levels = f.levels;
  options.silence_threshold_db = f.silence_db;
  const auto encoding = EncodeWaveform(ToWideband(signal), frames, *model, options);
  stage.Set("writing " + f.output);
  WriteBytes(f.output, encoding.bytes);
  out << encoding.report.ToKeyValue();
  return kExitOk;
}

int DecodeWaveformCommand(const std::string& input, const std::string& output,
                          const std::string& weights, std::ostream& out, Stage& stage) {
  const auto model = LoadWeights(weights, stage);
  stage.Set("reading " + input);
  const auto bytes = ReadBytes(input);
  stage.Set("decoding " + input);
  const auto decoded = DecodeWaveform(bytes, *model);
  stage.Set("writing " + output);
  WriteWav(decoded.signal, output);
  out << "samples=" << decoded.signal.size() << '\n';
  return kExitOk;
}

struct TrainFlags {
  std::string corpus, output, config, resume, loss_log;
  std::optional<std::uint64_t> seed;
};

std::vector<fs::path> ListWavFiles(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kIo, dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int TrainCommand(const TrainFlags& f, std::ostream& out, Stage& stage) {
  stage.Set("reading config " + f.config);
  Settings settings = LoadSettings(f.config);
  if (f.seed) settings.train.seed = *f.seed;
  stage.Set("listing corpus " + f.corpus);
  const auto files = ListWavFiles(f.corpus);
  std::vector<TrainingExample> corpus;
  for (const auto& path : files) {
    stage.Set("reading " + path.string());
    const auto signal = ReadWav(path);
    TrainingExample example;
    example.track = TrackFor(signal);
    example.signal = ToWideband(signal);
    corpus.push_back(std::move(example));
  }
  std::unique_ptr<ConditionalModel> model;
  std::vector<double> losses;
  if (settings.model == ModelChoice::kTable) {
    if (!f.resume.empty()) {
      throw Error(ErrorCode::kConfigMismatch, "--resume applies to wavenet models only");
    }
    std::vector<PcmSignal> signals;
    for (auto& example : corpus) signals.push_back(std::move(example.signal));
    stage.Set("training frequency table");
    model = TrainFrequencyTable(signals, settings.table_order);
  } else {
    std::optional<ModelWeights> initial;
    if (!f.resume.empty()) {
      const auto previous = LoadWeights(f.resume, stage);
      const auto* wavenet = dynamic_cast<const WaveNetModel*>(previous.get());
      if (wavenet == nullptr) {
        throw Error(ErrorCode::kConfigMismatch,
                    f.resume + " holds a " + ModelKindName(previous->kind()) + " model");
      }
      initial = wavenet->weights();
    }
    stage.Set("training");
    auto result = Train(corpus, settings.train, initial ? &*initial : nullptr);
    losses = std::move(result.loss_bits);
    model = std::make_unique<WaveNetModel>(std::move(result.weights));
  }
  if (!f.loss_log.empty()) {
    stage.Set("writing loss log " + f.loss_log);
    std::ostringstream csv;
    csv << "step,loss_bits\n";
    char buf[64];
    for (std::size_t i = 0; i < losses.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%zu,%.9f\n", i + 1, losses[i]);
      csv << buf;
    }
    const std::string text = csv.str();
    WriteBytes(f.loss_log, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
  stage.Set("writing " + f.output);
  SaveModelFile(*model, f.output);
  out << "model=" << ModelKindName(model->kind()) << '\n'
      << "files=" << files.size() << '\n'
      << "steps=" << losses.size() << '\n';
  if (!losses.empty()) PutValue(out, "final_loss_bits", losses.back());
  out << "fingerprint=" << ToHex(Fingerprint(*model)) << '\n';
  return kExitOk;
}

struct AnalyzeFlags {
  std::vector<std::string> inputs;
  std::string weights, trace, config;
  std::optional<double> silence_db;
  unsigned jobs = 1;
};

struct FileResult {
  std::string text;
  std::string error;
  int code = kExitOk;
};

FileResult AnalyzeOne(const std::string& input, const ConditionalModel& model,
                      std::optional<double> silence_db, const std::string& trace_path) {
  FileResult result;
  Stage stage;
  try {
    stage.Set("reading " + input);
    const auto signal = ReadWav(input);
    stage.Set("analyzing " + input);
    const auto analysis = AnalyzeSignal(signal, model, silence_db);
    if (!trace_path.empty()) {
      stage.Set("writing trace " + trace_path);
      ExportTrace(analysis.trace, fs::path(trace_path));
    }
    result.text = analysis.report.ToKeyValue();
  } catch (const Error& e) {
    result.code = ExitCodeFor(e.code());
    result.error = stage.where + ": " + e.what();
  }
  return result;
}

int AnalyzeCommand(const AnalyzeFlags& f, std::ostream& out, std::ostream& err, Stage& stage) {
  stage.Set("reading config " + f.config);
  Settings settings = LoadSettings(f.config);
  if (f.silence_db) settings.silence_db = f.silence_db;
  const bool batch = f.inputs.size() > 1;
  if (batch && !f.trace.empty() && !fs::is_directory(f.trace)) {
    err << "gvox analyze: with several inputs --trace must name an existing directory\n";
    return kExitUsage;
  }
  const auto model = LoadWeights(f.weights, stage);
  std::vector<std::string> traces(f.inputs.size());
  for (std::size_t i = 0; i < f.inputs.size() && !f.trace.empty(); ++i) {
    traces[i] = batch ? (fs::path(f.trace) / fs::path(f.inputs[i]).stem()).string() + ".csv"
                      : f.trace;
  }
  // Files are independent; results are printed in input order.
  std::vector<FileResult> results(f.inputs.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(f.jobs, f.inputs.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < f.inputs.size(); i += workers) {
        results[i] = AnalyzeOne(f.inputs[i], *model, settings.silence_db, traces[i]);
      }
    });
  }
  for (auto& t : pool) t.join();
  int code = kExitOk;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (batch) out << "file=" << f.inputs[i] << '\n';
    if (results[i].code != kExitOk) {
      err << "gvox analyze: " << results[i].error << '\n';
      if (code == kExitOk) code = results[i].code;
      continue;
    }
    out << results[i].text;
  }
  return code;
}

}  // namespace

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyCorpus:
    case ErrorCode::kConfigMismatch:
      return kExitUsage;
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kChecksumMismatch:
    case ErrorCode::kVersionMismatch:
      return kExitChecksum;
    case ErrorCode::kMalformedHeader:
    case ErrorCode::kUnsupportedFormat:
    case ErrorCode::kUnsupportedRate:
    case ErrorCode::kUnsupportedChannels:
    case ErrorCode::kBadMagic:
    case ErrorCode::kTruncated:
    case ErrorCode::kUnderrun:
    case ErrorCode::kAlignment:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kStateError:
      return kExitFormat;
  }
  return kExitInternal;
}

Settings ParseSettings(std::istream& in, const std::string& origin) {
  Settings s;
  TrainConfig& t = s.train;
  WaveNetConfig& a = t.architecture;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto integer = [](int* field) -> Setter {
    return [field](const std::string& k, const std::string& v) { *field = ParseNumber<int>(k, v); };
  };
  auto real = [](double* field) -> Setter {
    return [field](const std::string& k, const std::string& v) { *field = ParseNumber<double>(k, v); };
  };
  const std::map<std::string, Setter> setters = {
      {"model",
       [&s](const std::string& k, const std::string& v) {
         if (v == "wavenet") {
           s.model = ModelChoice::kWaveNet;
         } else if (v == "table") {
           s.model = ModelChoice::kTable;
         } else {
           throw Error(ErrorCode::kInvalidArgument, "bad value for " + k + ": '" + v + "'");
         }
       }},
      {"table_order", integer(&s.table_order)},
      {"conditioning_dim", integer(&a.conditioning_dim)},
      {"residual_channels", integer(&a.residual_channels)},
      {"skip_channels", integer(&a.skip_channels)},
      {"stacks", integer(&a.stacks)},
      {"layers_per_stack", integer(&a.layers_per_stack)},
      {"seed",
       [&t](const std::string& k, const std::string& v) {
         t.seed = ParseNumber<std::uint64_t>(k, v);
       }},
      {"steps", integer(&t.steps)},
      {"batch_size", integer(&t.batch_size)},
      {"window", integer(&t.window)},
      {"learning_rate", real(&t.learning_rate)},
      {"momentum", real(&t.momentum)},
      {"lr_decay", real(&t.lr_decay)},
      {"clip_norm", real(&t.clip_norm)},
      {"decay_at",
       [&t](const std::string& k, const std::string& v) {
         t.decay_at.clear();
         std::stringstream list(v);
         std::string item;
         while (std::getline(list, item, ',')) t.decay_at.push_back(ParseNumber<double>(k, Trim(item)));
       }},
      {"silence_db",
       [&s](const std::string& k, const std::string& v) { s.silence_db = ParseNumber<double>(k, v); }},
  };
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = Trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    const std::string where = origin + ":" + std::to_string(number);
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, where + ": expected key=value");
    }
    const std::string key = Trim(text.substr(0, eq));
    const auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorCode::kInvalidArgument, where + ": unknown key " + key);
    try {
      it->second(key, Trim(text.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.code(), where + ": " + e.what());
    }
  }
  return s;
}

Analysis AnalyzeSignal(const PcmSignal& signal, const ConditionalModel& model,
                       std::optional<double> silence_db) {
  const auto track = TrackFor(signal);
  const auto wide = ToWideband(signal);
  Analysis result;
  if (silence_db) {
    const auto mask = SilenceSampleMask(wide, *silence_db);
    result.trace = ComputeInfoTrace(model, wide, track, &mask);
  } else {
    result.trace = ComputeInfoTrace(model, wide, track);
  }
  result.report = SummarizeTrace(result.trace, kWidebandRate);
  return result;
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"gvox: generative speech coding toolkit"};
  app.require_subcommand(1);

  std::string in_path, out_path;
  auto* encode_parametric =
      app.add_subcommand("encode-parametric", "WAV to 50-bit-per-frame parametric stream (.gvp)");
  encode_parametric->add_option("input", in_path, "input WAV")->required();
  encode_parametric->add_option("output", out_path, "output .gvp")->required();

  DecodeParametricFlags dp;
  auto* decode_parametric =
      app.add_subcommand("decode-parametric", "synthesize speech from a parametric stream");
  decode_parametric->add_option("input", dp.input, "input .gvp")->required();
  decode_parametric->add_option("output", dp.output, "output WAV")->required();
  decode_parametric->add_option("-w,--weights", dp.weights, "model weights");
  decode_parametric->add_option("--seed", dp.seed, "sampling seed");
  decode_parametric->add_option("--temperature", dp.temperature, "sampling temperature");
  decode_parametric->add_flag("--fallback-sinusoidal", dp.fallback,
                              "render with the sinusoidal decoder, no weights needed");

  EncodeWaveformFlags ew;
  std::optional<double> ew_silence;
  auto* encode_waveform =
      app.add_subcommand("encode-waveform", "lossless mu-law coding driven by a model (.gvw)");
  encode_waveform->add_option("input", ew.input, "input WAV")->required();
  encode_waveform->add_option("output", ew.output, "output .gvw")->required();
  encode_waveform->add_option("-w,--weights", ew.weights, "model weights")->required();
  encode_waveform->add_option("--levels", ew.levels, "quantizer levels (power of two, 2..256)");
  encode_waveform->add_option("--silence-db", ew_silence, "exclude 20 ms frames below this level from rates");

  std::string dw_weights;
  auto* decode_waveform = app.add_subcommand("decode-waveform", "decode a .gvw file");
  decode_waveform->add_option("input", in_path, "input .gvw")->required();
  decode_waveform->add_option("output", out_path, "output WAV")->required();
  decode_waveform->add_option("-w,--weights", dw_weights, "model weights")->required();

  TrainFlags tr;
  std::optional<std::uint64_t> train_seed;
  auto* train = app.add_subcommand("train", "train a model on a directory of WAV files");
  train->add_option("corpus", tr.corpus, "directory of WAV files")->required();
  train->add_option("output", tr.output, "output .weights")->required();
  train->add_option("-c,--config", tr.config, "key=value settings file");
  train->add_option("--seed", train_seed, "overrides the config seed");
  train->add_option("--resume", tr.resume, "continue from these weights");
  train->add_option("--loss-log", tr.loss_log, "per-step loss CSV");

  AnalyzeFlags an;
  std::optional<double> an_silence;
  auto* analyze = app.add_subcommand("analyze", "per-sample information rates of WAV files");
  analyze->add_option("inputs", an.inputs, "input WAV files")->required();
  analyze->add_option("-w,--weights", an.weights, "model weights")->required();
  analyze->add_option("-c,--config", an.config, "key=value settings file");
  analyze->add_option("--trace", an.trace, "trace CSV (a directory for several inputs)");
  analyze->add_option("--silence-db", an_silence, "exclude 20 ms frames below this level");
  analyze->add_option("-j,--jobs", an.jobs, "parallel files in batch mode")
      ->check(CLI::Range(1u, 256u));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Stage stage;
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (*encode_parametric) return EncodeParametricCommand(in_path, out_path, out, stage);
    if (*decode_parametric) return DecodeParametricCommand(dp, out, err, stage);
    if (*encode_waveform) {
      ew.silence_db = ew_silence;
      return EncodeWaveformCommand(ew, out, stage);
    }
    if (*decode_waveform) return DecodeWaveformCommand(in_path, out_path, dw_weights, out, stage);
    if (*train) {
      tr.seed = train_seed;
      return TrainCommand(tr, out, stage);
    }
    if (*analyze) {
      an.silence_db = an_silence;
      return AnalyzeCommand(an, out, err, stage);
    }
  } catch (const Error& e) {
    err << "gvox " << name << ": " << stage.where << ": " << e.what() << '\n';
    return ExitCodeFor(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "gvox " << name << ": " << stage.where << ": " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "gvox " << name << ": " << stage.where << ": internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace gvox::cli
