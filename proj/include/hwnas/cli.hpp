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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hwnas {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitOperationError = 1,
  kExitUsageError = 2,
  kExitLintWarnings = 3,
};

/// Hex SHA-256 of `text`.
std::string sha256_hex(std::string_view text);
/// SHA-256 of `text` with every line holding a `"created"` timestamp removed,
/// so regenerated artifacts hash identically.
std::string content_hash(std::string_view text);

struct ManifestArtifact {
  std::string kind;  ///< lut, model, history, derived_net, metrics, ...
  std::string path;
  std::string sha256;
};

struct ManifestRun {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// Record of a pipeline: every command run and every file it produced.
/// Commands sharing a manifest path append to it; re-producing a path
/// replaces its entry.
struct RunManifest {
  std::string tool_version{kToolVersion};
  std::vector<ManifestRun> runs;
  std::vector<ManifestArtifact> artifacts;

  /// Hashes the file at `path` now and stores the path relative to
  /// `base_dir` (the manifest's directory) when one is given.
  void record(const std::string& kind, const std::string& path, const std::string& base_dir = {});
  std::vector<ManifestArtifact> of_kind(std::string_view kind) const;

  std::string to_json() const;
  static RunManifest from_json(std::string_view text);
  /// Empty manifest when the file does not exist.
  static RunManifest load_or_empty(const std::string& path);
};

/// Writes the SVG/CSV/JSON report for every manifest-listed artifact it
/// understands into `out_dir`; returns the written paths. Relative artifact
/// paths are resolved against `base_dir`.
std::vector<std::string> write_report(const RunManifest& manifest, const std::string& out_dir,
                                      const std::string& base_dir = ".");

/// Entry point of the `hwnas` tool.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hwnas
