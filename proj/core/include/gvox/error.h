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

#ifndef GVOX_ERROR_H_
#define GVOX_ERROR_H_

#include <stdexcept>
#include <string>

namespace gvox {

// Every failure raised by the library carries one of these codes so callers
// (and the command line tool) can tell error classes apart without parsing
// messages.
enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kMalformedHeader,
  kUnsupportedFormat,
  kUnsupportedRate,
  kUnsupportedChannels,
  kBadMagic,
  kVersionMismatch,
  kTruncated,
  kChecksumMismatch,
  kUnderrun,
  kAlignment,
  kDimensionMismatch,
  kEmptyCorpus,
  kStateError,
  kConfigMismatch,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gvox

#endif  // GVOX_ERROR_H_
