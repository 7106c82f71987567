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
#include <cmath>
#include <map>

#include "hwnas/profiler.hpp"

namespace hwnas {

namespace {

std::vector<double> run_checked(DeviceRunner& device, const CompactNet& subgraph, int trials) {
  auto samples = device.run(subgraph, trials);
  if (samples.size() != static_cast<std::size_t>(trials)) {
    throw Error(ErrorCode::kDeviceError, device.name() + " returned " + std::to_string(samples.size()) +
                                             " samples for " + std::to_string(trials) + " trials");
  }
  for (double v : samples) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kDeviceError, device.name() + " returned an invalid latency");
    }
  }
  return samples;
}

void check_counts(int n, int trials) {
  if (n < 1 || trials < 1) throw Error(ErrorCode::kInvalidArgument, "stacking needs N >= 1 and trials >= 1");
}

}  // namespace

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptySet, "median of no values");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

OperatorSpec stacking_anchor(const TensorShape& shape) { return ops::pointwise(shape.channels, shape.channels); }

double measure_stacked_same(DeviceRunner& device, const OperatorSpec& op, const TensorShape& input, int n,
                            int trials) {
  check_counts(n, trials);
  const TensorShape out = output_shape(op, input);
  if (out != input) {
    throw Error(ErrorCode::kNotStackable, canonical_key(op, input) + " maps " + to_string(input) + " to " +
                                              to_string(out));
  }
  CompactNet sub;
  sub.input_shape = input;
  sub.layers.assign(static_cast<std::size_t>(n), op);
  return median(run_checked(device, sub, trials)) / n;
}

MixedEstimate measure_stacked_mixed(DeviceRunner& device, const OperatorSpec& op_b, const OperatorSpec& anchor,
                                    double f_a, const TensorShape& input, int n, int trials) {
  check_counts(n, trials);
  const TensorShape mid = output_shape(op_b, input);
  const TensorShape after = output_shape(anchor, mid);
  if (after != mid) {
    throw Error(ErrorCode::kNotStackable, "anchor " + canonical_key(anchor, mid) + " does not preserve " +
                                              to_string(mid));
  }
  CompactNet sub;
  sub.input_shape = input;
  sub.layers.push_back(op_b);
  sub.layers.insert(sub.layers.end(), static_cast<std::size_t>(n), anchor);
  MixedEstimate est;
  est.raw_ms = median(run_checked(device, sub, trials)) - n * f_a;
  est.clamped = est.raw_ms < 0.0;
  est.latency_ms = std::max(est.raw_ms, 0.0);
  return est;
}

LutBuildError::LutBuildError(const Error& cause, LatencyTable partial)
    : Error(cause.code(), std::string("LUT build stopped: ") + cause.what()), partial_(std::move(partial)) {}

LatencyTable build_lut(DeviceRunner& device, const SuperNet& net, const LutBuildOptions& options,
                       LutBuildReport* report) {
  const ValidationReport v = validate(net);
  if (!v.ok()) throw Error(ErrorCode::kInvalidArgument, "supernet is invalid: " + v.summary());
  check_counts(options.n, options.trials);

  LutBuildReport local;
  LutBuildReport& rep = report ? *report : local;
  LutMetadata meta{LutSource::kMeasuredDevice, device.name(), utc_timestamp(), false};
  std::map<std::string, double> entries;
  // Same-shape measurements by key, shared between queries and anchors.
  std::map<std::string, double> stacked;
  auto same = [&](const OperatorSpec& op, const TensorShape& shape) {
    const std::string key = canonical_key(op, shape);
    if (auto it = stacked.find(key); it != stacked.end()) return it->second;
    const double f = measure_stacked_same(device, op, shape, options.n, options.trials);
    ++rep.device_runs;
    stacked.emplace(key, f);
    return f;
  };

  try {
    for (const auto& q : enumerate_queries(net)) {
      if (q.op.kind == OpKind::kIdentity) {
        entries[q.key] = 0.0;
        continue;
      }
      const TensorShape out = output_shape(q.op, q.input);
      if (out == q.input) {
        entries[q.key] = same(q.op, q.input);
        continue;
      }
      const OperatorSpec anchor = stacking_anchor(out);
      const double f_a = same(anchor, out);
      const MixedEstimate est = measure_stacked_mixed(device, q.op, anchor, f_a, q.input, options.n, options.trials);
      ++rep.device_runs;
      if (est.clamped) rep.clamped_keys.push_back(q.key);
      entries[q.key] = est.latency_ms;
    }
  } catch (const Error& e) {
    meta.incomplete = true;
    throw LutBuildError(e, LatencyTable(std::move(entries), meta));
  }
  return LatencyTable(std::move(entries), meta);
}

}  // namespace hwnas
