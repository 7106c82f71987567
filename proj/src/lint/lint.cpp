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

#include <algorithm>
#include <array>
#include <iomanip>
#include <sstream>
#include <tuple>

#include "hwnas/lint.hpp"
#include "json.hpp"

namespace hwnas {

namespace {

constexpr std::array<LintRule, 4> kRules = {{
    {"VPU001", Severity::kWarning, "operator runs on the DSP (per-channel LeakyReLU, DepthToSpace, bilinear upsample)",
     false},
    {"VPU002", Severity::kWarning, "convolution output channels are not a multiple of 16", false},
    {"VPU003", Severity::kAdvisory, "depthwise + pointwise pair with an activation that needs streaming", false},
    {"VPU004", Severity::kWarning, "GeLU runs on the DSP", true},
}};

const LintRule& rule(std::string_view id) {
  for (const auto& r : kRules) {
    if (r.id == id) return r;
  }
  throw std::logic_error("unregistered lint rule");
}

struct Site {
  int layer_index;
  int stage_index;
  int candidate_index;
  std::string where;
};

void add(std::vector<LintFinding>& out, std::string_view id, const Site& site, const std::string& message) {
  out.push_back({std::string(id), rule(id).severity, site.layer_index, site.stage_index, site.candidate_index,
                 site.where + ": " + message});
}

/// Lints a straight sequence of ops; `site_of(i)` locates op i.
template <typename SiteOf>
void lint_sequence(const std::vector<OperatorSpec>& seq, TensorShape shape, const LintOptions& o, SiteOf site_of,
                   std::vector<LintFinding>& out) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto& op = seq[i];
    const TensorShape next = output_shape(op, shape);
    const Site site = site_of(i);
    const std::string key = canonical_key(op, shape);

    if (op.kind == OpKind::kLeakyReLU && (op.per_channel_slope || o.strict_leaky_relu)) {
      add(out, "VPU001", site,
          std::string(op.per_channel_slope ? "per-channel " : "") + "LeakyReLU runs on the DSP (" + key + ")");
    } else if (op.kind == OpKind::kDepthToSpace) {
      add(out, "VPU001", site, "DepthToSpace runs on the DSP (" + key + ")");
    } else if (op.kind == OpKind::kUpsampleBilinear) {
      add(out, "VPU001", site, "align-corners bilinear upsampling runs on the DSP (" + key + ")");
    }

    if (is_conv_family(op.kind) && op.out_channels % o.channel_granularity != 0) {
      add(out, "VPU002", site,
          "out_channels " + std::to_string(op.out_channels) + " is not a multiple of " +
              std::to_string(o.channel_granularity) + " (" + key + ")");
    }

    // The depthwise output is the activation handed to the pointwise conv.
    double streamed = -1.0;
    if (op.kind == OpKind::kMBConv) {
      streamed = static_cast<double>(op.hidden_channels()) * next.height * next.width;
    } else if (op.kind == OpKind::kDWConv && i + 1 < seq.size() && seq[i + 1].kind == OpKind::kPointwiseConv) {
      streamed = static_cast<double>(next.elements());
    }
    if (streamed >= 0.0) {
      const double bytes = streamed * o.bytes_per_element;
      if (bytes > o.streaming_threshold_bytes) {
        std::ostringstream msg;
        msg << "depthwise activation of " << std::fixed << std::setprecision(0) << bytes << " bytes exceeds "
            << o.streaming_threshold_bytes << "; the pair is likely DMA-bound (" << key << ")";
        add(out, "VPU003", site, msg.str());
      }
    }
    shape = next;
  }
}

void sort_findings(std::vector<LintFinding>& f) {
  std::stable_sort(f.begin(), f.end(), [](const LintFinding& a, const LintFinding& b) {
    return std::tie(a.layer_index, a.candidate_index, a.rule_id) <
           std::tie(b.layer_index, b.candidate_index, b.rule_id);
  });
}

}  // namespace

std::string_view to_string(Severity severity) {
  return severity == Severity::kWarning ? "Warning" : "Advisory";
}

std::span<const LintRule> lint_rules() { return kRules; }

std::vector<LintFinding> lint_network(const CompactNet& net, const LintOptions& options) {
  std::vector<LintFinding> out;
  lint_sequence(net.layers, net.input_shape, options,
                [](std::size_t i) {
                  return Site{static_cast<int>(i), -1, -1, "layers[" + std::to_string(i) + "]"};
                },
                out);
  sort_findings(out);
  return out;
}

std::vector<LintFinding> lint_network(const SuperNet& net, const LintOptions& options) {
  std::vector<LintFinding> out;
  const int stem = static_cast<int>(net.stem.size());
  lint_sequence(net.stem, net.input_shape, options,
                [](std::size_t i) { return Site{static_cast<int>(i), -1, -1, "stem[" + std::to_string(i) + "]"}; },
                out);
  TensorShape shape = net.input_shape;
  for (const auto& op : net.stem) shape = output_shape(op, shape);
  for (std::size_t s = 0; s < net.stages.size(); ++s) {
    const auto& stage = net.stages[s];
    for (std::size_t c = 0; c < stage.candidates.size(); ++c) {
      lint_sequence(stage.candidates[c], stage.input_shape, options,
                    [&](std::size_t j) {
                      std::string where = "stages[" + std::to_string(s) + "].candidates[" + std::to_string(c) + "]";
                      if (stage.candidates[c].size() > 1) where += "[" + std::to_string(j) + "]";
                      return Site{stem + static_cast<int>(s), static_cast<int>(s), static_cast<int>(c), where};
                    },
                    out);
    }
    shape = stage.output_shape;
  }
  const int base = stem + static_cast<int>(net.stages.size());
  lint_sequence(net.head, shape, options,
                [base](std::size_t i) {
                  return Site{base + static_cast<int>(i), -1, -1, "head[" + std::to_string(i) + "]"};
                },
                out);
  sort_findings(out);
  return out;
}

std::size_t count_rule(std::span<const LintFinding> findings, std::string_view rule_id) {
  return static_cast<std::size_t>(
      std::count_if(findings.begin(), findings.end(), [&](const LintFinding& f) { return f.rule_id == rule_id; }));
}

bool has_warnings(std::span<const LintFinding> findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const LintFinding& f) { return f.severity == Severity::kWarning; });
}

std::string findings_to_json(std::span<const LintFinding> findings) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& f : findings) {
    nlohmann::ordered_json j;
    j["rule_id"] = f.rule_id;
    j["severity"] = std::string(to_string(f.severity));
    j["layer_index"] = f.layer_index;
    if (f.stage_index >= 0) {
      j["stage_index"] = f.stage_index;
      j["candidate_index"] = f.candidate_index;
    }
    j["message"] = f.message;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string findings_to_table(std::span<const LintFinding> findings) {
  if (findings.empty()) return "no findings\n";
  std::ostringstream out;
  out << std::left << std::setw(7) << "layer" << std::setw(8) << "rule" << std::setw(10) << "severity"
      << "message\n";
  for (const auto& f : findings) {
    out << std::setw(7) << f.layer_index << std::setw(8) << f.rule_id << std::setw(10) << to_string(f.severity)
        << f.message << '\n';
  }
  return out.str();
}

}  // namespace hwnas
