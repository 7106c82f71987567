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

#include "hwnas/error.hpp"

#include <utility>

namespace hwnas {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kInvalidOp: return "InvalidOp";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kStaleState: return "StaleState";
    case ErrorCode::kMissingEntry: return "MissingEntry";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kNotStackable: return "NotStackable";
    case ErrorCode::kDeviceError: return "DeviceError";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

ShapeMismatchError::ShapeMismatchError(int stage_index, int candidate_index,
                                       const std::string& message)
    : Error(ErrorCode::kShapeMismatch, message),
      stage_index_(stage_index),
      candidate_index_(candidate_index) {}

MissingEntryError::MissingEntryError(std::string key)
    : Error(ErrorCode::kMissingEntry, "no latency entry for key '" + key + "'"),
      key_(std::move(key)) {}

ParseError::ParseError(std::string path, const std::string& message)
    : Error(ErrorCode::kParseError, path + ": " + message), path_(std::move(path)) {}

}  // namespace hwnas
