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

#include <chrono>
#include <cmath>
#include <ctime>
#include <set>

#include "hwnas/error.hpp"
#include "hwnas/latency.hpp"
#include "json.hpp"

namespace hwnas {

std::string_view to_string(LutSource source) {
  switch (source) {
    case LutSource::kMeasuredDevice: return "MeasuredDevice";
    case LutSource::kCostModel: return "CostModel";
    case LutSource::kManual: return "Manual";
  }
  return "Manual";
}

LatencyTable::LatencyTable(std::map<std::string, double> entries, LutMetadata metadata)
    : entries_(std::move(entries)), metadata_(std::move(metadata)) {
  for (const auto& [key, ms] : entries_) {
    if (!std::isfinite(ms) || ms < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "latency for '" + key + "' must be finite and >= 0");
    }
  }
}

double LatencyTable::at(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw MissingEntryError(key);
  return it->second;
}

double lookup(const LatencyTable& lut, const OperatorSpec& op, const TensorShape& input) {
  return lut.at(canonical_key(op, input));
}

std::vector<LutQuery> enumerate_queries(const SuperNet& net) {
  std::vector<LutQuery> out;
  std::set<std::string> seen;
  auto add = [&](const OperatorSpec& op, const TensorShape& input) {
    auto key = canonical_key(op, input);
    if (seen.insert(key).second) out.push_back({op, input, std::move(key)});
  };
  TensorShape shape = net.input_shape;
  for (const auto& op : net.stem) {
    add(op, shape);
    shape = output_shape(op, shape);
  }
  for (const auto& stage : net.stages) {
    for (const auto& chain : stage.candidates) {
      TensorShape in = stage.input_shape;
      for (const auto& op : chain) {
        add(op, in);
        in = output_shape(op, in);
      }
    }
    shape = stage.output_shape;
  }
  for (const auto& op : net.head) {
    add(op, shape);
    shape = output_shape(op, shape);
  }
  return out;
}

std::vector<double> candidate_latencies(const LatencyTable& lut, const MixedStage& stage) {
  std::vector<double> f;
  f.reserve(stage.candidates.size());
  for (const auto& chain : stage.candidates) {
    double total = 0.0;
    TensorShape in = stage.input_shape;
    for (const auto& op : chain) {
      total += lookup(lut, op, in);
      in = output_shape(op, in);
    }
    f.push_back(total);
  }
  return f;
}

double fixed_latency(const LatencyTable& lut, const SuperNet& net) {
  double total = 0.0;
  TensorShape shape = net.input_shape;
  for (const auto& op : net.stem) {
    total += lookup(lut, op, shape);
    shape = output_shape(op, shape);
  }
  shape = net.stages.empty() ? shape : net.stages.back().output_shape;
  for (const auto& op : net.head) {
    total += lookup(lut, op, shape);
    shape = output_shape(op, shape);
  }
  return total;
}

double network_latency(const LatencyTable& lut, const CompactNet& net) {
  double total = 0.0;
  TensorShape shape = net.input_shape;
  for (const auto& op : net.layers) {
    total += lookup(lut, op, shape);
    shape = output_shape(op, shape);
  }
  return total;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string to_json(const LatencyTable& lut) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json meta;
  meta["source"] = std::string(to_string(lut.metadata().source));
  meta["device"] = lut.metadata().device;
  meta["created"] = lut.metadata().created;
  meta["incomplete"] = lut.metadata().incomplete;
  j["metadata"] = std::move(meta);
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
  for (const auto& [key, ms] : lut.entries()) entries[key] = ms;
  j["entries"] = std::move(entries);
  return j.dump(2) + "\n";
}

LatencyTable lut_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("lut", e.what());
  }
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_object()) {
    throw ParseError("$.entries", "missing entries object");
  }
  LutMetadata meta;
  if (j.contains("metadata")) {
    const auto& m = j["metadata"];
    const auto source = m.value("source", std::string("Manual"));
    if (source == "MeasuredDevice") {
      meta.source = LutSource::kMeasuredDevice;
    } else if (source == "CostModel") {
      meta.source = LutSource::kCostModel;
    } else if (source == "Manual") {
      meta.source = LutSource::kManual;
    } else {
      throw ParseError("$.metadata.source", "unknown source '" + source + "'");
    }
    meta.device = m.value("device", std::string());
    meta.created = m.value("created", std::string());
    meta.incomplete = m.value("incomplete", false);
  }
  std::map<std::string, double> entries;
  for (auto it = j["entries"].begin(); it != j["entries"].end(); ++it) {
    if (!it->is_number()) throw ParseError("$.entries." + it.key(), "expected a number");
    entries[it.key()] = it->get<double>();
  }
  try {
    return LatencyTable(std::move(entries), std::move(meta));
  } catch (const Error& e) {
    throw ParseError("$.entries", e.what());
  }
}

LatencyTable load_lut(const std::string& path) { return lut_from_json(read_text(path)); }

}  // namespace hwnas
