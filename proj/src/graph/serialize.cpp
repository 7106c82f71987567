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

#include <fstream>
#include <set>
#include <sstream>

#include "graph/json_io.hpp"
#include "hwnas/error.hpp"
#include "hwnas/graph.hpp"

namespace hwnas {

namespace detail {

ordered_json shape_to_json(const TensorShape& s) { return {s.channels, s.height, s.width}; }

ordered_json op_to_json(const OperatorSpec& op) {
  ordered_json j;
  j["kind"] = std::string(to_string(op.kind));
  j["kernel"] = op.kernel;
  j["stride"] = op.stride;
  j["in_channels"] = op.in_channels;
  j["out_channels"] = op.out_channels;
  if (op.expand_ratio.den() == 1) {
    j["expand_ratio"] = op.expand_ratio.num();
  } else {
    j["expand_ratio"] = op.expand_ratio.str();
  }
  j["activation_slope"] = op.activation_slope;
  j["scale_factor"] = op.scale_factor;
  if (op.per_channel_slope) j["per_channel_slope"] = true;
  return j;
}

ordered_json ops_to_json(const std::vector<OperatorSpec>& ops) {
  ordered_json arr = ordered_json::array();
  for (const auto& op : ops) arr.push_back(op_to_json(op));
  return arr;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) known = known || it.key() == k;
    if (!known) throw ParseError(path + "." + it.key(), "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "." + key, "missing required field");
  return *it;
}

int positive_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw ParseError(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < 1 || x > (std::int64_t{1} << 30)) throw ParseError(path, "must be a positive integer");
  return static_cast<int>(x);
}

TensorShape parse_shape(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw ParseError(path, "expected [C,H,W]");
  return {positive_int(v[0], path + "[0]"), positive_int(v[1], path + "[1]"),
          positive_int(v[2], path + "[2]")};
}

OperatorSpec parse_op(const json& j, const std::string& path) {
  check_keys(j, path, {"kind", "kernel", "stride", "in_channels", "out_channels", "expand_ratio",
                       "activation_slope", "scale_factor", "per_channel_slope"});
  OperatorSpec op;
  const auto& kind = require(j, path, "kind");
  if (!kind.is_string()) throw ParseError(path + ".kind", "expected a string");
  auto k = op_kind_from_string(kind.get<std::string>());
  if (!k) throw ParseError(path + ".kind", "unknown operator kind '" + kind.get<std::string>() + "'");
  op.kind = *k;
  op.in_channels = positive_int(require(j, path, "in_channels"), path + ".in_channels");
  op.out_channels = positive_int(require(j, path, "out_channels"), path + ".out_channels");
  if (j.contains("kernel")) op.kernel = positive_int(j["kernel"], path + ".kernel");
  if (j.contains("stride")) op.stride = positive_int(j["stride"], path + ".stride");
  if (j.contains("scale_factor")) op.scale_factor = positive_int(j["scale_factor"], path + ".scale_factor");
  if (j.contains("expand_ratio")) {
    const auto& e = j["expand_ratio"];
    const auto epath = path + ".expand_ratio";
    if (e.is_number_integer()) {
      op.expand_ratio = Rational(positive_int(e, epath));
    } else if (e.is_string()) {
      auto r = Rational::parse(e.get<std::string>());
      if (!r) throw ParseError(epath, "expected a positive rational like \"3/2\"");
      op.expand_ratio = *r;
    } else {
      throw ParseError(epath, "expected an integer or a \"num/den\" string");
    }
  }
  if (j.contains("activation_slope")) {
    const auto& a = j["activation_slope"];
    if (!a.is_number()) throw ParseError(path + ".activation_slope", "expected a number");
    op.activation_slope = a.get<double>();
    if (!(op.activation_slope >= 0.0)) throw ParseError(path + ".activation_slope", "must be >= 0");
  }
  if (j.contains("per_channel_slope")) {
    if (!j["per_channel_slope"].is_boolean()) throw ParseError(path + ".per_channel_slope", "expected a boolean");
    op.per_channel_slope = j["per_channel_slope"].get<bool>();
  }
  return op;
}

}  // namespace detail

namespace {

using namespace detail;

std::vector<OperatorSpec> parse_ops(const json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array of operators");
  std::vector<OperatorSpec> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_op(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Task parse_task(const json& v, const std::string& path) {
  if (v == "Classification") return Task::kClassification;
  if (v == "SuperResolution") return Task::kSuperResolution;
  throw ParseError(path, "expected \"Classification\" or \"SuperResolution\"");
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) line += text[i] == '\n';
    throw ParseError("line " + std::to_string(line), e.what());
  }
}

void parse_task_meta(const json& j, Task& task, std::optional<int>& num_classes,
                     std::optional<int>& sr_scale) {
  task = parse_task(require(j, "$", "task"), "$.task");
  if (j.contains("num_classes")) num_classes = positive_int(j["num_classes"], "$.num_classes");
  if (j.contains("sr_scale")) sr_scale = positive_int(j["sr_scale"], "$.sr_scale");
}

void write_task_meta(ordered_json& j, const std::optional<int>& num_classes,
                     const std::optional<int>& sr_scale) {
  if (num_classes) j["num_classes"] = *num_classes;
  if (sr_scale) j["sr_scale"] = *sr_scale;
}

SuperNet supernet_from_json(const json& j) {
  check_keys(j, "$", {"task", "input_shape", "stem", "stages", "head", "num_classes", "sr_scale"});
  SuperNet net;
  parse_task_meta(j, net.task, net.num_classes, net.sr_scale);
  net.input_shape = parse_shape(require(j, "$", "input_shape"), "$.input_shape");
  if (j.contains("stem")) net.stem = parse_ops(j["stem"], "$.stem");
  if (j.contains("head")) net.head = parse_ops(j["head"], "$.head");
  const auto& stages = require(j, "$", "stages");
  if (!stages.is_array()) throw ParseError("$.stages", "expected an array");

  // Shapes are optional on input; missing ones are inferred along the chain.
  std::optional<TensorShape> running = net.input_shape;
  for (std::size_t i = 0; running && i < net.stem.size(); ++i) running = try_output_shape(net.stem[i], *running);

  for (std::size_t s = 0; s < stages.size(); ++s) {
    const auto spath = "$.stages[" + std::to_string(s) + "]";
    const auto& sj = stages[s];
    check_keys(sj, spath, {"candidates", "input_shape", "output_shape"});
    MixedStage stage;
    const auto& cands = require(sj, spath, "candidates");
    if (!cands.is_array()) throw ParseError(spath + ".candidates", "expected an array");
    for (std::size_t c = 0; c < cands.size(); ++c) {
      const auto cpath = spath + ".candidates[" + std::to_string(c) + "]";
      if (cands[c].is_array()) {
        if (cands[c].empty()) throw ParseError(cpath, "empty candidate chain");
        stage.candidates.push_back(parse_ops(cands[c], cpath));
      } else {
        stage.candidates.push_back({parse_op(cands[c], cpath)});
      }
    }
    if (sj.contains("input_shape")) {
      stage.input_shape = parse_shape(sj["input_shape"], spath + ".input_shape");
    } else if (running) {
      stage.input_shape = *running;
    } else {
      throw ParseError(spath + ".input_shape", "missing and cannot be inferred");
    }
    if (sj.contains("output_shape")) {
      stage.output_shape = parse_shape(sj["output_shape"], spath + ".output_shape");
    } else {
      std::optional<TensorShape> out = stage.input_shape;
      if (stage.candidates.empty()) out.reset();
      for (std::size_t i = 0; out && !stage.candidates.empty() && i < stage.candidates[0].size(); ++i) {
        out = try_output_shape(stage.candidates[0][i], *out);
      }
      if (!out) throw ParseError(spath + ".output_shape", "missing and cannot be inferred");
      stage.output_shape = *out;
    }
    running = stage.output_shape;
    net.stages.push_back(std::move(stage));
  }
  return net;
}

CompactNet compact_from_json(const json& j) {
  check_keys(j, "$", {"task", "input_shape", "layers", "num_classes", "sr_scale", "derivation"});
  CompactNet net;
  parse_task_meta(j, net.task, net.num_classes, net.sr_scale);
  net.input_shape = parse_shape(require(j, "$", "input_shape"), "$.input_shape");
  net.layers = parse_ops(require(j, "$", "layers"), "$.layers");
  if (j.contains("derivation")) {
    const auto& d = j["derivation"];
    check_keys(d, "$.derivation", {"choices", "ties"});
    Derivation der;
    const auto& choices = require(d, "$.derivation", "choices");
    const auto& ties = require(d, "$.derivation", "ties");
    if (!choices.is_array() || !ties.is_array() || choices.size() != ties.size()) {
      throw ParseError("$.derivation", "choices and ties must be arrays of equal length");
    }
    for (std::size_t i = 0; i < choices.size(); ++i) {
      if (!choices[i].is_number_integer() || choices[i].get<int>() < 0) {
        throw ParseError("$.derivation.choices[" + std::to_string(i) + "]", "expected a non-negative integer");
      }
      if (!ties[i].is_boolean()) throw ParseError("$.derivation.ties[" + std::to_string(i) + "]", "expected a boolean");
      der.choices.push_back(choices[i].get<int>());
      der.ties.push_back(ties[i].get<bool>());
    }
    net.derivation = std::move(der);
  }
  return net;
}

}  // namespace

std::string serialize(const SuperNet& net) {
  ordered_json j;
  j["task"] = std::string(to_string(net.task));
  j["input_shape"] = shape_to_json(net.input_shape);
  j["stem"] = ops_to_json(net.stem);
  ordered_json stages = ordered_json::array();
  for (const auto& stage : net.stages) {
    ordered_json sj;
    ordered_json cands = ordered_json::array();
    for (const auto& chain : stage.candidates) {
      cands.push_back(chain.size() == 1 ? op_to_json(chain.front()) : ops_to_json(chain));
    }
    sj["candidates"] = std::move(cands);
    sj["input_shape"] = shape_to_json(stage.input_shape);
    sj["output_shape"] = shape_to_json(stage.output_shape);
    stages.push_back(std::move(sj));
  }
  j["stages"] = std::move(stages);
  j["head"] = ops_to_json(net.head);
  write_task_meta(j, net.num_classes, net.sr_scale);
  return j.dump(2) + "\n";
}

std::string serialize(const CompactNet& net) {
  ordered_json j;
  j["task"] = std::string(to_string(net.task));
  j["input_shape"] = shape_to_json(net.input_shape);
  j["layers"] = ops_to_json(net.layers);
  write_task_meta(j, net.num_classes, net.sr_scale);
  if (net.derivation) {
    ordered_json d;
    d["choices"] = net.derivation->choices;
    ordered_json ties = ordered_json::array();
    for (bool t : net.derivation->ties) ties.push_back(t);
    d["ties"] = std::move(ties);
    j["derivation"] = std::move(d);
  }
  return j.dump(2) + "\n";
}

SuperNet deserialize_supernet(std::string_view text) {
  const auto j = parse_document(text);
  if (!j.is_object()) throw ParseError("$", "expected an object");
  return supernet_from_json(j);
}

CompactNet deserialize_compact(std::string_view text) {
  const auto j = parse_document(text);
  if (!j.is_object()) throw ParseError("$", "expected an object");
  return compact_from_json(j);
}

std::variant<SuperNet, CompactNet> deserialize_network(std::string_view text) {
  const auto j = parse_document(text);
  if (!j.is_object()) throw ParseError("$", "expected an object");
  if (j.contains("layers")) return compact_from_json(j);
  return supernet_from_json(j);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void save_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for '" + path + "'");
}

SuperNet load_supernet(const std::string& path) {
  try {
    return deserialize_supernet(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.path(), e.what());
  }
}

CompactNet load_compact(const std::string& path) {
  try {
    return deserialize_compact(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ":" + e.path(), e.what());
  }
}

}  // namespace hwnas
