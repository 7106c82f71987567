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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hwnas/graph.hpp"

namespace hwnas {

enum class Severity { kWarning, kAdvisory };
std::string_view to_string(Severity severity);

struct LintFinding {
  std::string rule_id;
  Severity severity = Severity::kWarning;
  /// Position in the layer sequence; for a supernet, stem layers come first,
  /// then one slot per stage, then the head.
  int layer_index = 0;
  int stage_index = -1;      ///< supernet stage, -1 for fixed layers
  int candidate_index = -1;  ///< supernet candidate, -1 for fixed layers
  std::string message;

  bool operator==(const LintFinding&) const = default;
};

struct LintRule {
  std::string_view id;
  Severity severity;
  std::string_view summary;
  bool reserved;  ///< documented but never emitted
};

/// VPU001 DSP-bound operators, VPU002 conv output channels not a multiple of
/// 16, VPU003 depthwise + pointwise pairs whose intermediate activation needs
/// streaming, VPU004 GeLU (reserved: not in the operator set).
std::span<const LintRule> lint_rules();

struct LintOptions {
  /// Flag every LeakyReLU, not only per-channel ones.
  bool strict_leaky_relu = false;
  double streaming_threshold_bytes = 1024.0 * 1024.0;
  int bytes_per_element = 2;
  int channel_granularity = 16;
};

/// Findings ordered by layer index, then candidate, then rule id.
std::vector<LintFinding> lint_network(const CompactNet& net, const LintOptions& options = {});
/// Lints stem, head and every candidate chain separately.
std::vector<LintFinding> lint_network(const SuperNet& net, const LintOptions& options = {});

std::size_t count_rule(std::span<const LintFinding> findings, std::string_view rule_id);
bool has_warnings(std::span<const LintFinding> findings);

std::string findings_to_json(std::span<const LintFinding> findings);
std::string findings_to_table(std::span<const LintFinding> findings);

}  // namespace hwnas
