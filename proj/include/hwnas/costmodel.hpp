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

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hwnas/graph.hpp"
#include "hwnas/latency.hpp"
#include "hwnas/nn.hpp"
#include "hwnas/profiler.hpp"

namespace hwnas {

inline constexpr std::size_t kNumFeatures = kNumOpKinds + 8 + 1;

/// [0, 13)  one-hot operator kind
/// [13, 21) log2(1 + x) of in_channels, out_channels, input height, input
///          width, kernel, stride, expand-ratio numerator, scale factor
/// [21]     1 when the activation slope is non-zero or per-channel
using FeatureVector = std::array<double, kNumFeatures>;

FeatureVector encode_features(const OperatorSpec& op, const TensorShape& input);

struct ProfileRecord {
  OperatorSpec op;
  TensorShape input;
  double measured_cycles = 0.0;

  bool operator==(const ProfileRecord&) const = default;
};

/// One `{"op":{...},"input_shape":[C,H,W],"measured_cycles":x}` per line.
std::string to_jsonl(std::span<const ProfileRecord> records);
std::vector<ProfileRecord> records_from_jsonl(std::string_view text);

/// A random valid (op, input) workload; Identity is never drawn.
std::pair<OperatorSpec, TensorShape> random_workload(Rng& rng);
/// `count` random workloads costed by the device's noiseless closed form,
/// converted to cycles at its clock.
std::vector<ProfileRecord> simulate_records(const SimulatedVPU& device, int count, std::uint64_t seed);

struct CostModelConfig {
  int hidden1 = 64;
  int hidden2 = 64;
  int epochs = 1500;
  double lr = 3e-3;  ///< peak rate, cosine-annealed to 0
  double weight_decay = 0.5;
  int batch_size = 64;
  double val_fraction = 0.2;
  std::uint64_t seed = 3;
};

struct CostModelReport {
  std::vector<double> train_loss;  ///< per epoch, MSE of standardized log(cycles)
  std::vector<double> val_loss;
  double train_mape = 0.0;
  double val_mape = 0.0;
  std::size_t train_records = 0;
  std::size_t val_records = 0;
};

/// MLP kNumFeatures -> hidden1 -> hidden2 -> 1 with ReLU, regressing the
/// standardized log(cycles) from standardized features.
class CostModel {
 public:
  CostModel(const CostModelConfig& cfg, std::uint64_t seed);
  CostModel(CostModel&&) noexcept;
  CostModel& operator=(CostModel&&) noexcept;
  ~CostModel();

  /// Always positive.
  double predict(const OperatorSpec& op, const TensorShape& input);
  std::vector<double> predict_batch(std::span<const FeatureVector> features);

  std::string to_json();
  static CostModel from_json(std::string_view text);

 private:
  friend std::pair<CostModel, CostModelReport> train_cost_model(std::span<const ProfileRecord>,
                                                                const CostModelConfig&);
  Tensor standardize(std::span<const FeatureVector> features) const;

  int hidden1_, hidden2_;
  std::unique_ptr<Network> net_;
  std::vector<double> feature_mean_, feature_std_;
  double target_mean_ = 0.0, target_std_ = 1.0;
};

/// Adam on the MSE of standardized log targets; the final layer starts at
/// zero so the initial prediction is the mean. Requires >= 50 records.
std::pair<CostModel, CostModelReport> train_cost_model(std::span<const ProfileRecord> records,
                                                       const CostModelConfig& cfg);

/// Mean of |pred - actual| / actual, in percent.
double evaluate_mape(CostModel& model, std::span<const ProfileRecord> records);

/// Every query of the supernet at predict(...) / (clock_ghz * 1e6) ms;
/// Identity entries are 0.
LatencyTable lut_from_model(CostModel& model, const SuperNet& net, double clock_ghz);

}  // namespace hwnas
