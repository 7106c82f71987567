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

#include <set>
#include <sstream>

#include "hwnas/error.hpp"
#include "hwnas/graph.hpp"

namespace hwnas {

namespace {

std::optional<TensorShape> chain_output(const Candidate& chain, TensorShape shape,
                                        std::string* why) {
  if (chain.empty()) {
    if (why) *why = "empty candidate chain";
    return std::nullopt;
  }
  for (const auto& op : chain) {
    auto next = try_output_shape(op, shape, why);
    if (!next) return std::nullopt;
    shape = *next;
  }
  return shape;
}

std::string stage_location(std::size_t stage, std::size_t candidate) {
  return "stages[" + std::to_string(stage) + "].candidates[" + std::to_string(candidate) + "]";
}

void check_task_output(Task task, const TensorShape& input, const TensorShape& output,
                       const std::optional<int>& num_classes, const std::optional<int>& sr_scale,
                       std::vector<ValidationFinding>& findings) {
  using Kind = ValidationFinding::Kind;
  if (task == Task::kClassification) {
    if (!num_classes || *num_classes < 1) {
      findings.push_back({Kind::kStructure, "num_classes", "classification requires num_classes >= 1"});
    } else if (output != TensorShape{*num_classes, 1, 1}) {
      findings.push_back({Kind::kShapeMismatch, "head",
                          "classification output " + to_string(output) + " != (" +
                              std::to_string(*num_classes) + ",1,1)"});
    }
    if (sr_scale) findings.push_back({Kind::kStructure, "sr_scale", "sr_scale given for classification"});
  } else {
    if (!sr_scale || *sr_scale < 1) {
      findings.push_back({Kind::kStructure, "sr_scale", "super-resolution requires sr_scale >= 1"});
    } else {
      const TensorShape want{input.channels, input.height * *sr_scale, input.width * *sr_scale};
      if (output != want) {
        findings.push_back({Kind::kShapeMismatch, "head",
                            "super-resolution output " + to_string(output) + " != " + to_string(want)});
      }
    }
    if (num_classes) findings.push_back({Kind::kStructure, "num_classes", "num_classes given for super-resolution"});
  }
}

// Walks fixed layers, recording invariant and shape findings. Returns the
// shape after the sequence (continuing with the declared shape when an op
// cannot be inferred, so later findings stay meaningful).
std::optional<TensorShape> walk_fixed(const std::vector<OperatorSpec>& layers,
                                      const std::string& prefix, TensorShape shape,
                                      std::vector<ValidationFinding>& findings) {
  using Kind = ValidationFinding::Kind;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto loc = prefix + "[" + std::to_string(i) + "]";
    if (auto v = op_violations(layers[i]); !v.empty()) {
      for (auto& msg : v) findings.push_back({Kind::kInvariantViolation, loc, msg});
      return std::nullopt;
    }
    std::string why;
    auto next = try_output_shape(layers[i], shape, &why);
    if (!next) {
      findings.push_back({Kind::kShapeMismatch, loc, why});
      return std::nullopt;
    }
    shape = *next;
  }
  return shape;
}

}  // namespace

MixedStage make_stage(std::vector<Candidate> candidates, const TensorShape& input) {
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "stage needs candidates");
  std::string why;
  auto out = chain_output(candidates.front(), input, &why);
  if (!out) throw Error(ErrorCode::kInvalidOp, why);
  return MixedStage{std::move(candidates), input, *out};
}

std::vector<TensorShape> infer_shapes(const SuperNet& net) {
  std::vector<TensorShape> shapes;
  TensorShape shape = net.input_shape;
  auto fixed = [&](const std::vector<OperatorSpec>& layers, const char* name) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
      std::string why;
      auto next = try_output_shape(layers[i], shape, &why);
      if (!next) throw ShapeMismatchError(-1, -1, std::string(name) + "[" + std::to_string(i) + "]: " + why);
      shape = *next;
      shapes.push_back(shape);
    }
  };
  fixed(net.stem, "stem");
  for (std::size_t s = 0; s < net.stages.size(); ++s) {
    const auto& stage = net.stages[s];
    if (stage.input_shape != shape) {
      throw ShapeMismatchError(static_cast<int>(s), -1,
                               "stage " + std::to_string(s) + " declares input " +
                                   to_string(stage.input_shape) + " but receives " + to_string(shape));
    }
    for (std::size_t c = 0; c < stage.candidates.size(); ++c) {
      std::string why;
      auto out = chain_output(stage.candidates[c], shape, &why);
      if (!out || *out != stage.output_shape) {
        throw ShapeMismatchError(
            static_cast<int>(s), static_cast<int>(c),
            stage_location(s, c) + ": " +
                (out ? "produces " + to_string(*out) + ", stage declares " + to_string(stage.output_shape)
                     : why));
      }
    }
    shape = stage.output_shape;
    shapes.push_back(shape);
  }
  fixed(net.head, "head");
  return shapes;
}

std::vector<TensorShape> infer_shapes(const CompactNet& net) {
  std::vector<TensorShape> shapes;
  TensorShape shape = net.input_shape;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    std::string why;
    auto next = try_output_shape(net.layers[i], shape, &why);
    if (!next) throw ShapeMismatchError(-1, -1, "layers[" + std::to_string(i) + "]: " + why);
    shape = *next;
    shapes.push_back(shape);
  }
  return shapes;
}

CompactNet compose(const SuperNet& net, const std::vector<int>& choices) {
  if (choices.size() != net.stages.size()) {
    throw Error(ErrorCode::kLengthMismatch, "need one choice per stage");
  }
  CompactNet out;
  out.task = net.task;
  out.input_shape = net.input_shape;
  out.num_classes = net.num_classes;
  out.sr_scale = net.sr_scale;
  out.layers = net.stem;
  for (std::size_t s = 0; s < net.stages.size(); ++s) {
    const auto& cands = net.stages[s].candidates;
    const int c = choices[s];
    if (c < 0 || static_cast<std::size_t>(c) >= cands.size()) {
      throw Error(ErrorCode::kInvalidArgument, "choice out of range at stage " + std::to_string(s));
    }
    out.layers.insert(out.layers.end(), cands[c].begin(), cands[c].end());
  }
  out.layers.insert(out.layers.end(), net.head.begin(), net.head.end());
  out.derivation = Derivation{choices, std::vector<bool>(choices.size(), false)};
  return out;
}

std::size_t ValidationReport::count(ValidationFinding::Kind kind) const {
  std::size_t n = 0;
  for (const auto& f : findings) n += f.kind == kind;
  return n;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (const auto& f : findings) {
    const char* kind = f.kind == ValidationFinding::Kind::kInvariantViolation ? "InvariantViolation"
                       : f.kind == ValidationFinding::Kind::kShapeMismatch    ? "ShapeMismatch"
                                                                              : "Structure";
    os << kind << " at " << f.location << ": " << f.message << "\n";
  }
  return os.str();
}

ValidationReport validate(const SuperNet& net) {
  using Kind = ValidationFinding::Kind;
  ValidationReport report;
  auto& findings = report.findings;
  if (!net.input_shape.valid()) {
    findings.push_back({Kind::kInvariantViolation, "input_shape", "dimensions must be >= 1"});
    return report;
  }
  if (net.stages.empty()) findings.push_back({Kind::kStructure, "stages", "need at least one stage"});

  auto shape = walk_fixed(net.stem, "stem", net.input_shape, findings);
  for (std::size_t s = 0; s < net.stages.size(); ++s) {
    const auto& stage = net.stages[s];
    const auto sloc = "stages[" + std::to_string(s) + "]";
    if (stage.candidates.empty()) {
      findings.push_back({Kind::kStructure, sloc, "stage has no candidates"});
    }
    if (!stage.input_shape.valid() || !stage.output_shape.valid()) {
      findings.push_back({Kind::kInvariantViolation, sloc, "declared shapes must be positive"});
      shape.reset();
      continue;
    }
    if (shape && *shape != stage.input_shape) {
      findings.push_back({Kind::kShapeMismatch, sloc,
                          "declared input " + to_string(stage.input_shape) + " but receives " +
                              to_string(*shape)});
    }
    std::set<std::string> keys;
    for (std::size_t c = 0; c < stage.candidates.size(); ++c) {
      const auto& chain = stage.candidates[c];
      const auto cloc = stage_location(s, c);
      if (chain.empty()) {
        findings.push_back({Kind::kStructure, cloc, "empty candidate"});
        continue;
      }
      bool invalid = false;
      for (const auto& op : chain) {
        for (auto& msg : op_violations(op)) {
          findings.push_back({Kind::kInvariantViolation, cloc, msg});
          invalid = true;
        }
      }
      if (invalid) continue;
      std::string why;
      TensorShape in = stage.input_shape;
      std::string key;
      bool ok = true;
      for (const auto& op : chain) {
        auto next = try_output_shape(op, in, &why);
        if (!next) {
          ok = false;
          break;
        }
        key += canonical_key(op, in) + "|";
        in = *next;
      }
      if (!ok) {
        findings.push_back({Kind::kShapeMismatch, cloc, why});
        continue;
      }
      if (in != stage.output_shape) {
        findings.push_back({Kind::kShapeMismatch, cloc,
                            "produces " + to_string(in) + ", stage declares " +
                                to_string(stage.output_shape)});
        continue;
      }
      if (!keys.insert(key).second) {
        findings.push_back({Kind::kStructure, cloc, "duplicate candidate in stage"});
      }
    }
    shape = stage.output_shape;
  }
  if (shape) shape = walk_fixed(net.head, "head", *shape, findings);
  if (shape) check_task_output(net.task, net.input_shape, *shape, net.num_classes, net.sr_scale, findings);
  return report;
}

ValidationReport validate(const CompactNet& net) {
  ValidationReport report;
  if (!net.input_shape.valid()) {
    report.findings.push_back({ValidationFinding::Kind::kInvariantViolation, "input_shape",
                               "dimensions must be >= 1"});
    return report;
  }
  if (net.layers.empty()) {
    report.findings.push_back({ValidationFinding::Kind::kStructure, "layers", "no layers"});
  }
  auto shape = walk_fixed(net.layers, "layers", net.input_shape, report.findings);
  // Profiling subgraphs carry no task metadata; only check nets that do.
  if (shape && (net.num_classes || net.sr_scale)) {
    check_task_output(net.task, net.input_shape, *shape, net.num_classes, net.sr_scale,
                      report.findings);
  }
  return report;
}

}  // namespace hwnas
