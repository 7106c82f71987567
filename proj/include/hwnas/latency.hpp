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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "hwnas/graph.hpp"

namespace hwnas {

enum class LutSource { kMeasuredDevice, kCostModel, kManual };

std::string_view to_string(LutSource source);

struct LutMetadata {
  LutSource source = LutSource::kManual;
  std::string device;
  /// ISO-8601 UTC creation time. Excluded from content hashes.
  std::string created;
  /// Set when profiling failed part-way; the entries present are still valid.
  bool incomplete = false;
};

/// Latency lookup table: canonical operator key -> latency in milliseconds.
/// Immutable once constructed.
class LatencyTable {
 public:
  LatencyTable() = default;
  /// Throws Error(kInvalidArgument) for negative or non-finite latencies.
  LatencyTable(std::map<std::string, double> entries, LutMetadata metadata);

  const std::map<std::string, double>& entries() const { return entries_; }
  const LutMetadata& metadata() const { return metadata_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& key) const { return entries_.count(key) != 0; }

  /// Throws MissingEntryError when the key is absent.
  double at(const std::string& key) const;

 private:
  std::map<std::string, double> entries_;
  LutMetadata metadata_;
};

/// F(o): latency of `op` applied to `input`.
double lookup(const LatencyTable& lut, const OperatorSpec& op, const TensorShape& input);

/// One LUT query: an operator at the input shape it sees in the network.
struct LutQuery {
  OperatorSpec op;
  TensorShape input;
  std::string key;
};

/// Every unique (op, input) pair of stem, stage candidates and head, in
/// first-appearance order. Shared by all LUT producers so key sets agree.
std::vector<LutQuery> enumerate_queries(const SuperNet& net);

/// Per-candidate latency of a stage: each candidate chain sums its ops.
std::vector<double> candidate_latencies(const LatencyTable& lut, const MixedStage& stage);
/// Stem + head latency (always executed).
double fixed_latency(const LatencyTable& lut, const SuperNet& net);
/// Sum of all layer latencies of a compact net.
double network_latency(const LatencyTable& lut, const CompactNet& net);

/// E[latency_i] = sum_j p_j * f_j. Requires equal lengths, p_j >= 0 and
/// sum(p) == 1 within 1e-9.
double expected_stage_latency(std::span<const double> p, std::span<const double> f);

struct StageLatency {
  std::vector<double> p;
  std::vector<double> f;
};

/// sum_i E[latency_i] + fixed_ms. Assumes layers execute sequentially, so
/// latencies add; inter-layer overlap is not modelled.
double expected_network_latency(std::span<const StageLatency> stages, double fixed_ms = 0.0);

/// Exact gradient of sum_j softmax(alpha)_j * f_j with respect to alpha:
/// g_k = sum_j f_j * p_j * (delta_jk - p_k) = p_k * (f_k - E[f]).
std::vector<double> latency_alpha_grad(std::span<const double> p, std::span<const double> f);

/// {"metadata":{...},"entries":{"<key>":latency_ms,...}}
std::string to_json(const LatencyTable& lut);
LatencyTable lut_from_json(std::string_view text);
LatencyTable load_lut(const std::string& path);

/// Current UTC time formatted as ISO-8601.
std::string utc_timestamp();

}  // namespace hwnas
