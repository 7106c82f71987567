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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hwnas/error.hpp"
#include "hwnas/graph.hpp"
#include "hwnas/latency.hpp"

namespace hwnas {

/// Something that can time a whole subgraph.
class DeviceRunner {
 public:
  virtual ~DeviceRunner() = default;
  virtual std::string name() const = 0;
  /// Exactly `trials` latencies in ms, each >= 0. Throws Error(kDeviceError).
  virtual std::vector<double> run(const CompactNet& subgraph, int trials) = 0;
};

struct SimulatedVpuConfig {
  double clock_ghz = 0.7;
  double macs_per_cycle = 64.0;
  double graph_overhead_ms = 0.2;
  double dma_ms_per_mb = 0.05;
  int channel_granularity = 16;
  double dsp_penalty_factor = 4.0;
  double noise_sigma_rel = 0.0;
  std::uint64_t seed = 0;
  int bytes_per_element = 2;  ///< fp16 activations and weights

  bool operator==(const SimulatedVpuConfig&) const = default;
};

std::string to_json(const SimulatedVpuConfig& cfg);
SimulatedVpuConfig simulated_vpu_config_from_json(std::string_view text);

/// Deterministic accelerator model. Per layer:
///
///   cost = (macs / (clock_ghz * 1e6 * macs_per_cycle * util) + MB moved * dma_ms_per_mb) * dsp
///
/// where util = out_channels / round_up(out_channels, channel_granularity),
/// MB moved counts input, output and weights (1 MB = 1e6 bytes) and dsp is
/// dsp_penalty_factor for LeakyReLU with a non-zero or per-channel slope,
/// DepthToSpace and UpsampleBilinear (1 otherwise). Identity is free. A
/// subgraph costs graph_overhead_ms plus the sum of its layers.
///
/// With noise_sigma_rel > 0 every layer and the overhead are scaled by an
/// independent exp(sigma * z), z ~ N(0, 1), seeded from (seed, subgraph
/// content, trial index), so repeated runs are reproducible.
class SimulatedVPU : public DeviceRunner {
 public:
  explicit SimulatedVPU(SimulatedVpuConfig cfg = {}) : cfg_(cfg) {}

  std::string name() const override { return "sim"; }
  std::vector<double> run(const CompactNet& subgraph, int trials) override;

  const SimulatedVpuConfig& config() const { return cfg_; }
  /// Noiseless cost of one layer, excluding graph overhead.
  double layer_cost_ms(const OperatorSpec& op, const TensorShape& input) const;
  /// Noiseless cost of a subgraph, including graph overhead.
  double closed_form_ms(const CompactNet& subgraph) const;
  /// Number of run() calls so far.
  std::size_t runs() const { return runs_; }

 private:
  SimulatedVpuConfig cfg_;
  std::size_t runs_ = 0;
};

/// Multiply-accumulates of one layer (comparisons for pools, one per element
/// for activations, four per output element for bilinear interpolation).
double layer_macs(const OperatorSpec& op, const TensorShape& input);
bool is_dsp_bound(const OperatorSpec& op);

struct ExternalRunnerConfig {
  /// Shell command; `{graph}` is replaced by the path of the `.net.json`.
  std::string command;
  double timeout_s = 60.0;
};

/// Runs a user command per measurement. The command prints one latency in ms
/// per line; it is re-invoked until `trials` values have been collected.
class ExternalCommandRunner : public DeviceRunner {
 public:
  explicit ExternalCommandRunner(ExternalRunnerConfig cfg);
  std::string name() const override { return "external"; }
  std::vector<double> run(const CompactNet& subgraph, int trials) override;

 private:
  ExternalRunnerConfig cfg_;
};

/// Median; the mean of the two middle values for even sizes.
double median(std::vector<double> values);

/// F(op) = median(L) / N, L the latency of N stacked copies of `op`.
/// Throws Error(kNotStackable) when `op` changes the shape of `input`.
double measure_stacked_same(DeviceRunner& device, const OperatorSpec& op, const TensorShape& input, int n,
                            int trials);

struct MixedEstimate {
  double latency_ms = 0.0;
  double raw_ms = 0.0;   ///< before clamping
  bool clamped = false;  ///< the subtraction went negative
};

/// F(op_b) = median(L) - N * f_a, L the latency of op_b followed by N copies
/// of `anchor` (which must preserve op_b's output shape).
MixedEstimate measure_stacked_mixed(DeviceRunner& device, const OperatorSpec& op_b, const OperatorSpec& anchor,
                                    double f_a, const TensorShape& input, int n, int trials);

/// Pointwise convolution C -> C, the anchor used for shape-changing ops.
OperatorSpec stacking_anchor(const TensorShape& shape);

struct LutBuildOptions {
  int n = 20;
  int trials = 5;
};

struct LutBuildReport {
  std::vector<std::string> clamped_keys;
  std::size_t device_runs = 0;
};

/// Raised when profiling fails part-way; carries what was measured so far,
/// flagged incomplete.
class LutBuildError : public Error {
 public:
  LutBuildError(const Error& cause, LatencyTable partial);
  const LatencyTable& partial() const { return partial_; }

 private:
  LatencyTable partial_;
};

/// Profiles every unique (op, input) of the supernet. Shape-preserving ops
/// are stacked on themselves; shape-changing ops are followed by a stack of
/// pointwise anchors measured first at the output shape. Identity is 0.
/// The supernet is validated before any device run.
LatencyTable build_lut(DeviceRunner& device, const SuperNet& net, const LutBuildOptions& options = {},
                       LutBuildReport* report = nullptr);

struct CalibrationPoint {
  double predicted_ms = 0.0;
  double measured_ms = 0.0;
};

struct CalibrationReport {
  std::vector<CalibrationPoint> points;
  double mape = 0.0;  ///< percent
  /// Absent for fewer than two points or zero variance.
  std::optional<double> pearson;

  std::string to_csv() const;
  std::string to_json() const;
};

std::optional<double> pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

/// Samples `num_samples` uniform-random compact nets, predicts each from the
/// LUT and measures it on the device (median of `trials`).
CalibrationReport calibrate(DeviceRunner& device, const SuperNet& net, const LatencyTable& lut, int num_samples,
                            std::uint64_t seed, int trials = 5);

}  // namespace hwnas
