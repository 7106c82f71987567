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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "hwnas/error.hpp"
#include "hwnas/latency.hpp"
#include "hwnas/profiler.hpp"
#include "hwnas/rng.hpp"
#include "hwnas/spaces.hpp"

namespace hwnas {
namespace {

/// Test device: overhead plus a fixed cost per canonical key, each term
/// optionally scaled by independent log-normal noise.
class KeyedDevice : public DeviceRunner {
 public:
  KeyedDevice(std::map<std::string, double> costs, double overhead, double sigma = 0.0, std::uint64_t seed = 7)
      : costs_(std::move(costs)), overhead_(overhead), sigma_(sigma), rng_(seed) {}

  std::string name() const override { return "keyed"; }
  std::vector<double> run(const CompactNet& subgraph, int trials) override {
    ++runs;
    std::vector<double> out;
    for (int t = 0; t < trials; ++t) {
      double total = overhead_ * noise();
      TensorShape shape = subgraph.input_shape;
      for (const auto& op : subgraph.layers) {
        total += costs_.at(canonical_key(op, shape)) * noise();
        shape = output_shape(op, shape);
      }
      out.push_back(total);
    }
    return out;
  }

  int runs = 0;

 private:
  double noise() { return sigma_ == 0.0 ? 1.0 : std::exp(sigma_ * rng_.normal()); }

  std::map<std::string, double> costs_;
  double overhead_, sigma_;
  Rng rng_;
};

/// Fails every run after the first `budget`.
class FlakyDevice : public DeviceRunner {
 public:
  explicit FlakyDevice(int budget) : budget_(budget) {}
  std::string name() const override { return "flaky"; }
  std::vector<double> run(const CompactNet& subgraph, int trials) override {
    if (budget_-- <= 0) throw Error(ErrorCode::kDeviceError, "device went away");
    return inner_.run(subgraph, trials);
  }

 private:
  int budget_;
  SimulatedVPU inner_;
};

const TensorShape kShape{16, 8, 8};
const OperatorSpec kOp = ops::conv(3, 1, 16, 16);
const OperatorSpec kAnchor = ops::pointwise(16, 16);
const OperatorSpec kDown = ops::conv(3, 2, 16, 16);
const TensorShape kDownOut{16, 4, 4};

std::map<std::string, double> keyed_costs() {
  return {{canonical_key(kOp, kShape), 0.5},
          {canonical_key(kAnchor, kShape), 0.5},
          {canonical_key(kAnchor, kDownOut), 0.5},
          {canonical_key(kDown, kShape), 0.8}};
}

TEST(Median, OddEvenAndPermutationInvariant) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  std::vector<double> v{5.0, 1.0, 9.0, 3.0, 7.0, 2.0};
  const double m = median(v);
  std::sort(v.begin(), v.end());
  do {
    EXPECT_EQ(median(v), m);
  } while (std::next_permutation(v.begin(), v.end()));
}

TEST(StackedSame, OverheadAmortizesOverN) {
  KeyedDevice device(keyed_costs(), 0.2);
  EXPECT_NEAR(measure_stacked_same(device, kOp, kShape, 10, 5), 0.52, 1e-12);
  EXPECT_NEAR(measure_stacked_same(device, kOp, kShape, 100, 5), 0.502, 1e-12);
}

TEST(StackedSame, BiasIsExactlyOverheadOverN) {
  SimulatedVPU device;
  const double truth = device.layer_cost_ms(kOp, kShape);
  for (int n : {1, 10, 100}) {
    const double f = measure_stacked_same(device, kOp, kShape, n, 3);
    EXPECT_NEAR(f - truth, device.config().graph_overhead_ms / n, 1e-12) << n;
  }
}

TEST(StackedSame, NoisyEstimateWithinFivePercent) {
  KeyedDevice device(keyed_costs(), 0.2, 0.05, 7);
  const double f = measure_stacked_same(device, kOp, kShape, 50, 9);
  EXPECT_LT(std::abs(f - 0.504) / 0.504, 0.05);
}

TEST(StackedSame, ShapeChangingOpIsNotStackable) {
  KeyedDevice device(keyed_costs(), 0.2);
  try {
    (void)measure_stacked_same(device, kDown, kShape, 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotStackable);
  }
  EXPECT_EQ(device.runs, 0);
}

TEST(StackedMixed, OverheadCancelsWithMatchedN) {
  KeyedDevice device(keyed_costs(), 0.2);
  const MixedEstimate e = measure_stacked_mixed(device, kDown, kAnchor, 0.52, kShape, 10, 5);
  EXPECT_NEAR(e.latency_ms, 0.8, 1e-12);
  EXPECT_FALSE(e.clamped);
}

TEST(StackedMixed, SmallNCarriesOverhead) {
  KeyedDevice device(keyed_costs(), 0.2);
  EXPECT_NEAR(measure_stacked_mixed(device, kDown, kAnchor, 0.5, kShape, 1, 1).latency_ms, 1.0, 1e-12);
}

TEST(StackedMixed, NoisyEstimateWithinTenPercent) {
  KeyedDevice device(keyed_costs(), 0.2, 0.05, 7);
  const double f_a = measure_stacked_same(device, kAnchor, kDownOut, 50, 9);
  const MixedEstimate e = measure_stacked_mixed(device, kDown, kAnchor, f_a, kShape, 50, 9);
  EXPECT_LT(std::abs(e.latency_ms - 0.8) / 0.8, 0.10);
}

TEST(StackedMixed, NegativeEstimateIsClampedAndFlagged) {
  KeyedDevice device(keyed_costs(), 0.2);
  const MixedEstimate e = measure_stacked_mixed(device, kDown, kAnchor, 0.7, kShape, 10, 1);
  EXPECT_TRUE(e.clamped);
  EXPECT_EQ(e.latency_ms, 0.0);
  EXPECT_LT(e.raw_ms, 0.0);
}

TEST(StackingAnchor, IsShapePreservingPointwise) {
  const OperatorSpec a = stacking_anchor({24, 5, 5});
  EXPECT_EQ(a.kind, OpKind::kPointwiseConv);
  EXPECT_EQ(output_shape(a, {24, 5, 5}), (TensorShape{24, 5, 5}));
}

SuperNet shape_preserving_net() {
  SuperNet net;
  net.input_shape = kShape;
  net.stages.push_back(make_stage({{kOp}, {ops::conv(5, 1, 16, 16)}, {ops::identity(16)}}, kShape));
  net.stages.push_back(make_stage({{kOp}, {ops::relu(16)}, {ops::max_pool(3, 1, 16)}}, kShape));
  net.head = {ops::avg_pool(3, 1, 16)};
  net.num_classes = 2;
  net.head.push_back(ops::linear(16 * 8 * 8, 2));
  return net;
}

TEST(BuildLut, KeysAreTheUniqueQueries) {
  SimulatedVPU device;
  const SuperNet net = spaces::toy_sr();
  const LatencyTable lut = build_lut(device, net);
  std::set<std::string> expect;
  for (const auto& q : enumerate_queries(net)) expect.insert(q.key);
  std::set<std::string> got;
  for (const auto& [k, v] : lut.entries()) got.insert(k);
  EXPECT_EQ(got, expect);
  EXPECT_EQ(lut.metadata().source, LutSource::kMeasuredDevice);
  EXPECT_EQ(lut.metadata().device, "sim");
  EXPECT_FALSE(lut.metadata().incomplete);
}

TEST(BuildLut, NoiselessEntriesMatchClosedForm) {
  SimulatedVPU device;
  const SuperNet net = spaces::mobile();
  const LutBuildOptions options{.n = 20, .trials = 3};
  const LatencyTable lut = build_lut(device, net, options);
  const double bias = device.config().graph_overhead_ms / options.n;
  for (const auto& q : enumerate_queries(net)) {
    const double truth = device.layer_cost_ms(q.op, q.input);
    const double got = lut.at(q.key);
    if (q.op.kind == OpKind::kIdentity) {
      EXPECT_EQ(got, 0.0);
    } else if (output_shape(q.op, q.input) == q.input) {
      EXPECT_NEAR(got - truth, bias, 1e-9) << q.key;
    } else {
      EXPECT_LE(std::abs(got - truth), 1e-9 + bias) << q.key;
    }
  }
}

TEST(BuildLut, OneDeviceRunPerMeasuredKey) {
  SimulatedVPU device;
  const SuperNet net = spaces::toy_sr();
  LutBuildReport report;
  const LatencyTable lut = build_lut(device, net, {}, &report);
  std::set<std::string> anchors;
  std::size_t measured = 0;
  for (const auto& q : enumerate_queries(net)) {
    if (q.op.kind == OpKind::kIdentity) continue;
    ++measured;
    const TensorShape out = output_shape(q.op, q.input);
    if (out != q.input) anchors.insert(canonical_key(stacking_anchor(out), out));
  }
  std::size_t extra_anchors = 0;
  for (const auto& k : anchors) extra_anchors += lut.contains(k) ? 0 : 1;
  EXPECT_EQ(device.runs(), measured + extra_anchors);
  EXPECT_EQ(report.device_runs, device.runs());
}

TEST(BuildLut, InvalidSupernetIssuesNoDeviceRuns) {
  SimulatedVPU device;
  SuperNet net = shape_preserving_net();
  net.stages[1].candidates.clear();
  EXPECT_THROW(build_lut(device, net), Error);
  EXPECT_EQ(device.runs(), 0u);
}

TEST(BuildLut, FailureCarriesIncompletePartialTable) {
  FlakyDevice device(3);
  try {
    (void)build_lut(device, spaces::toy_classification());
    FAIL();
  } catch (const LutBuildError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDeviceError);
    EXPECT_TRUE(e.partial().metadata().incomplete);
    EXPECT_GE(e.partial().size(), 1u);
    SimulatedVPU full;
    EXPECT_LT(e.partial().size(), build_lut(full, spaces::toy_classification()).size());
  }
}

TEST(SimulatedVpu, ConvCostFollowsFormula) {
  SimulatedVPU device;
  // 32 out channels at 32x32, 16 in, 3x3: fully utilized.
  const double macs = 32.0 * 32 * 32 * 16 * 9;
  const double bytes = (16.0 * 32 * 32 + 32.0 * 32 * 32 + 32 * 16 * 9 + 32) * 2;
  const double expect = macs / (0.7e6 * 64) + bytes / 1e6 * 0.05;
  EXPECT_NEAR(device.layer_cost_ms(ops::conv(3, 1, 16, 32), {16, 32, 32}), expect, 1e-15);
}

TEST(SimulatedVpu, ChannelGranularityPenalty) {
  SimulatedVpuConfig cfg;
  cfg.dma_ms_per_mb = 0.0;
  SimulatedVPU device(cfg);
  const double c24 = device.layer_cost_ms(ops::pointwise(16, 24), {16, 8, 8});
  const double c32 = device.layer_cost_ms(ops::pointwise(16, 32), {16, 8, 8});
  // 24 channels occupy 32 lanes: same time as 32 channels.
  EXPECT_NEAR(c24, c32, 1e-15);
}

TEST(SimulatedVpu, DspPenaltyAndFreeIdentity) {
  SimulatedVPU device;
  const TensorShape s{8, 8, 8};
  EXPECT_NEAR(device.layer_cost_ms(ops::leaky_relu(8, 0.1), s), 4.0 * device.layer_cost_ms(ops::relu(8), s), 1e-15);
  EXPECT_TRUE(is_dsp_bound(ops::depth_to_space(8, 2)));
  EXPECT_TRUE(is_dsp_bound(ops::upsample_bilinear(8, 2)));
  EXPECT_FALSE(is_dsp_bound(ops::upsample_nearest(8, 2)));
  EXPECT_FALSE(is_dsp_bound(ops::leaky_relu(8, 0.0)));
  EXPECT_EQ(device.layer_cost_ms(ops::identity(8), s), 0.0);
}

TEST(SimulatedVpu, NoiseIsReproducibleAndSeedDependent) {
  SimulatedVpuConfig cfg;
  cfg.noise_sigma_rel = 0.05;
  cfg.seed = 3;
  SimulatedVPU a(cfg), b(cfg);
  cfg.seed = 4;
  SimulatedVPU c(cfg);
  const CompactNet net{.input_shape = kShape, .layers = {kOp, kOp}};
  const auto ra = a.run(net, 5);
  EXPECT_EQ(ra, b.run(net, 5));
  EXPECT_NE(ra, c.run(net, 5));
  EXPECT_EQ(ra.size(), 5u);
  for (double v : ra) EXPECT_GT(v, 0.0);
}

TEST(SimulatedVpu, ConfigJsonRoundTrip) {
  SimulatedVpuConfig cfg;
  cfg.noise_sigma_rel = 0.125;
  cfg.seed = 99;
  cfg.channel_granularity = 8;
  EXPECT_EQ(simulated_vpu_config_from_json(to_json(cfg)), cfg);
  EXPECT_THROW(simulated_vpu_config_from_json(R"({"clock": 1})"), ParseError);
}

TEST(Calibrate, ExactLutPredictsMeasuredMinusOverhead) {
  SimulatedVPU device;
  const SuperNet net = spaces::mobile();
  std::map<std::string, double> exact;
  for (const auto& q : enumerate_queries(net)) exact[q.key] = device.layer_cost_ms(q.op, q.input);
  const LatencyTable lut(exact, {LutSource::kManual, "sim", "", false});
  const CalibrationReport report = calibrate(device, net, lut, 20, 5, 1);
  ASSERT_EQ(report.points.size(), 20u);
  for (const auto& p : report.points) {
    EXPECT_NEAR(p.predicted_ms, p.measured_ms - device.config().graph_overhead_ms, 1e-12);
  }
  ASSERT_TRUE(report.pearson.has_value());
  EXPECT_GT(*report.pearson, 0.999);
}

TEST(Calibrate, SinglePointHasNoCorrelation) {
  SimulatedVPU device;
  const SuperNet net = spaces::toy_classification();
  const LatencyTable lut = build_lut(device, net);
  const CalibrationReport report = calibrate(device, net, lut, 1, 5);
  EXPECT_EQ(report.points.size(), 1u);
  EXPECT_FALSE(report.pearson.has_value());
  EXPECT_NE(report.to_json().find("null"), std::string::npos);
}

TEST(Calibrate, CsvLayout) {
  CalibrationReport r;
  r.points = {{1.5, 2.0}, {0.25, 0.5}};
  EXPECT_EQ(r.to_csv(), "predicted_ms,measured_ms\n1.5,2\n0.25,0.5\n");
}

TEST(Pearson, KnownValues) {
  EXPECT_NEAR(*pearson_correlation({1, 2, 3}, {2, 4, 6}), 1.0, 1e-15);
  EXPECT_NEAR(*pearson_correlation({1, 2, 3}, {3, 2, 1}), -1.0, 1e-15);
  EXPECT_FALSE(pearson_correlation({1, 1, 1}, {1, 2, 3}).has_value());
}

TEST(ExternalRunner, ParsesOneLatencyPerLine) {
  ExternalCommandRunner runner({.command = "printf '1.5\\n2.5\\n'", .timeout_s = 10});
  const CompactNet net{.input_shape = kShape, .layers = {kOp}};
  EXPECT_EQ(runner.run(net, 3), (std::vector<double>{1.5, 2.5, 1.5}));
}

TEST(ExternalRunner, ReceivesTheGraphFile) {
  ExternalCommandRunner runner({.command = "grep -q Conv {graph} && echo 0.75", .timeout_s = 10});
  const CompactNet net{.input_shape = kShape, .layers = {kOp}};
  EXPECT_EQ(runner.run(net, 1), (std::vector<double>{0.75}));
}

TEST(ExternalRunner, NonZeroExitIsDeviceError) {
  ExternalCommandRunner runner({.command = "echo 1.0; exit 3", .timeout_s = 10});
  const CompactNet net{.input_shape = kShape, .layers = {kOp}};
  try {
    runner.run(net, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDeviceError);
  }
}

TEST(ExternalRunner, TimeoutIsDeviceError) {
  ExternalCommandRunner runner({.command = "sleep 5", .timeout_s = 0.2});
  const CompactNet net{.input_shape = kShape, .layers = {kOp}};
  EXPECT_THROW(runner.run(net, 1), Error);
}

TEST(ExternalRunner, GarbageOutputIsDeviceError) {
  ExternalCommandRunner runner({.command = "echo fast", .timeout_s = 10});
  const CompactNet net{.input_shape = kShape, .layers = {kOp}};
  EXPECT_THROW(runner.run(net, 1), Error);
}

}  // namespace
}  // namespace hwnas
