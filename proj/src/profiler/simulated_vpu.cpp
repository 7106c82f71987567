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

#include <cmath>
#include <set>

#include "hwnas/profiler.hpp"
#include "hwnas/rng.hpp"
#include "json.hpp"

namespace hwnas {

namespace {

using nlohmann::ordered_json;

double weight_count(const OperatorSpec& op) {
  const double cin = op.in_channels, cout = op.out_channels, k2 = op.kernel * op.kernel;
  switch (op.kind) {
    case OpKind::kConv:
      return cout * cin * k2 + cout;
    case OpKind::kDWConv:
      return cin * k2 + cin;
    case OpKind::kPointwiseConv:
    case OpKind::kLinear:
      return cout * cin + cout;
    case OpKind::kMBConv: {
      const double h = op.hidden_channels();
      return cin * h + h * k2 + h * cout + 2.0 * (2.0 * h + cout);
    }
    case OpKind::kLeakyReLU:
      return op.per_channel_slope ? cin : 0.0;
    default:
      return 0.0;
  }
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t content_hash(const CompactNet& net) {
  std::string text = to_string(net.input_shape);
  TensorShape shape = net.input_shape;
  for (const auto& op : net.layers) {
    text += '|' + canonical_key(op, shape);
    shape = output_shape(op, shape);
  }
  return fnv1a(text);
}

}  // namespace

double layer_macs(const OperatorSpec& op, const TensorShape& input) {
  const TensorShape out = output_shape(op, input);
  const double out_hw = static_cast<double>(out.height) * out.width;
  const double in_hw = static_cast<double>(input.height) * input.width;
  const double k2 = op.kernel * op.kernel;
  switch (op.kind) {
    case OpKind::kConv:
      return out_hw * out.channels * input.channels * k2;
    case OpKind::kDWConv:
    case OpKind::kAvgPool:
    case OpKind::kMaxPool:
      return out_hw * out.channels * k2;
    case OpKind::kPointwiseConv:
      return out_hw * out.channels * input.channels;
    case OpKind::kMBConv: {
      const double h = op.hidden_channels();
      return in_hw * input.channels * h + out_hw * h * k2 + out_hw * h * out.channels;
    }
    case OpKind::kReLU:
    case OpKind::kLeakyReLU:
      return static_cast<double>(out.elements());
    case OpKind::kUpsampleBilinear:
      return 4.0 * static_cast<double>(out.elements());
    case OpKind::kLinear:
      return static_cast<double>(op.in_channels) * op.out_channels;
    case OpKind::kIdentity:
    case OpKind::kUpsampleNearest:
    case OpKind::kDepthToSpace:
      return 0.0;
  }
  return 0.0;
}

bool is_dsp_bound(const OperatorSpec& op) {
  switch (op.kind) {
    case OpKind::kLeakyReLU:
      return op.activation_slope != 0.0 || op.per_channel_slope;
    case OpKind::kDepthToSpace:
    case OpKind::kUpsampleBilinear:
      return true;
    default:
      return false;
  }
}

double SimulatedVPU::layer_cost_ms(const OperatorSpec& op, const TensorShape& input) const {
  if (op.kind == OpKind::kIdentity) {
    output_shape(op, input);  // still validates
    return 0.0;
  }
  const TensorShape out = output_shape(op, input);
  const int g = cfg_.channel_granularity;
  const double padded = static_cast<double>((out.channels + g - 1) / g * g);
  const double util = out.channels / padded;
  const double compute = layer_macs(op, input) / (cfg_.clock_ghz * 1e6 * cfg_.macs_per_cycle * util);
  const double bytes = (static_cast<double>(input.elements()) + static_cast<double>(out.elements()) +
                        weight_count(op)) *
                       cfg_.bytes_per_element;
  const double dma = bytes / 1e6 * cfg_.dma_ms_per_mb;
  return (compute + dma) * (is_dsp_bound(op) ? cfg_.dsp_penalty_factor : 1.0);
}

double SimulatedVPU::closed_form_ms(const CompactNet& subgraph) const {
  double total = cfg_.graph_overhead_ms;
  TensorShape shape = subgraph.input_shape;
  for (const auto& op : subgraph.layers) {
    total += layer_cost_ms(op, shape);
    shape = output_shape(op, shape);
  }
  return total;
}

std::vector<double> SimulatedVPU::run(const CompactNet& subgraph, int trials) {
  if (trials < 1) throw Error(ErrorCode::kDeviceError, "sim: trials must be positive");
  ++runs_;
  std::vector<double> layer_costs;
  TensorShape shape = subgraph.input_shape;
  for (const auto& op : subgraph.layers) {
    layer_costs.push_back(layer_cost_ms(op, shape));
    shape = output_shape(op, shape);
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(trials));
  if (cfg_.noise_sigma_rel == 0.0) {
    double total = cfg_.graph_overhead_ms;
    for (double c : layer_costs) total += c;
    out.assign(static_cast<std::size_t>(trials), total);
    return out;
  }
  const std::uint64_t content = content_hash(subgraph);
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(cfg_.seed, content, static_cast<std::uint64_t>(t)));
    double total = cfg_.graph_overhead_ms * std::exp(cfg_.noise_sigma_rel * rng.normal());
    for (double c : layer_costs) total += c * std::exp(cfg_.noise_sigma_rel * rng.normal());
    out.push_back(total);
  }
  return out;
}

std::string to_json(const SimulatedVpuConfig& cfg) {
  ordered_json j;
  j["clock_ghz"] = cfg.clock_ghz;
  j["macs_per_cycle"] = cfg.macs_per_cycle;
  j["graph_overhead_ms"] = cfg.graph_overhead_ms;
  j["dma_ms_per_mb"] = cfg.dma_ms_per_mb;
  j["channel_granularity"] = cfg.channel_granularity;
  j["dsp_penalty_factor"] = cfg.dsp_penalty_factor;
  j["noise_sigma_rel"] = cfg.noise_sigma_rel;
  j["seed"] = cfg.seed;
  j["bytes_per_element"] = cfg.bytes_per_element;
  return j.dump(2) + "\n";
}

SimulatedVpuConfig simulated_vpu_config_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!j.is_object()) throw ParseError("$", "device config must be an object");
  static const std::set<std::string> known = {"clock_ghz",          "macs_per_cycle",  "graph_overhead_ms",
                                              "dma_ms_per_mb",      "channel_granularity",
                                              "dsp_penalty_factor", "noise_sigma_rel", "seed",
                                              "bytes_per_element"};
  SimulatedVpuConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ParseError("$." + key, "unknown field");
    try {
      if (key == "clock_ghz") cfg.clock_ghz = value.get<double>();
      if (key == "macs_per_cycle") cfg.macs_per_cycle = value.get<double>();
      if (key == "graph_overhead_ms") cfg.graph_overhead_ms = value.get<double>();
      if (key == "dma_ms_per_mb") cfg.dma_ms_per_mb = value.get<double>();
      if (key == "channel_granularity") cfg.channel_granularity = value.get<int>();
      if (key == "dsp_penalty_factor") cfg.dsp_penalty_factor = value.get<double>();
      if (key == "noise_sigma_rel") cfg.noise_sigma_rel = value.get<double>();
      if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      if (key == "bytes_per_element") cfg.bytes_per_element = value.get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("$." + key, e.what());
    }
  }
  if (!(cfg.clock_ghz > 0) || !(cfg.macs_per_cycle > 0) || cfg.channel_granularity < 1 ||
      cfg.bytes_per_element < 1) {
    throw ParseError("$", "clock, throughput, granularity and element size must be positive");
  }
  if (!(cfg.graph_overhead_ms >= 0) || !(cfg.dma_ms_per_mb >= 0) || !(cfg.noise_sigma_rel >= 0)) {
    throw ParseError("$", "overhead, dma cost and noise must be non-negative");
  }
  if (!(cfg.dsp_penalty_factor >= 1)) throw ParseError("$.dsp_penalty_factor", "must be >= 1");
  return cfg;
}

}  // namespace hwnas
