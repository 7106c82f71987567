// Copyright 2026 The hwnas Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hwnas {

enum class ErrorCode {
  kShapeMismatch,
  kInvalidOp,
  kParseError,
  kStaleState,
  kMissingEntry,
  kLengthMismatch,
  kNotNormalized,
  kNonFiniteLoss,
  kNotStackable,
  kDeviceError,
  kInsufficientData,
  kEmptySet,
  kInvalidArgument,
  kIoError,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library. The code identifies the
/// failure class; the message carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a stage candidate (or a fixed layer, candidate == -1) does
/// not produce the shape the network declares. Stage -1 means stem/head.
class ShapeMismatchError : public Error {
 public:
  ShapeMismatchError(int stage_index, int candidate_index, const std::string& message);
  int stage_index() const noexcept { return stage_index_; }
  int candidate_index() const noexcept { return candidate_index_; }

 private:
  int stage_index_;
  int candidate_index_;
};

class MissingEntryError : public Error {
 public:
  explicit MissingEntryError(std::string key);
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// `path` is a JSON-pointer-like location ("stages[1].candidates[0].kernel")
/// or "line N" for syntax errors.
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& message);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace hwnas
