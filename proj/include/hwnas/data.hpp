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
#include <span>
#include <vector>

#include "hwnas/graph.hpp"
#include "hwnas/nn.hpp"
#include "hwnas/tensor.hpp"

namespace hwnas {

struct DatasetSpec {
  Task task = Task::kClassification;
  int num_samples = 600;
  /// Input image shape (low-resolution shape for super-resolution).
  TensorShape image{3, 16, 16};
  int num_classes = 10;
  int sr_scale = 2;
  std::uint64_t seed = 42;
  double noise = 0.25;
  /// Classification only: two classes separated along a fixed direction.
  bool separable = false;
};

struct Split {
  Tensor inputs;            ///< [n, C, H, W]
  std::vector<int> labels;  ///< classification
  Tensor targets;           ///< super-resolution, [n, C, sH, sW]
  std::size_t size() const { return inputs.rank() ? inputs.dim(0) : 0; }
};

/// Deterministic 70/15/15 split of generated samples.
struct Dataset {
  Task task = Task::kClassification;
  TensorShape input_shape;
  TensorShape target_shape;
  int num_classes = 0;
  Split train, val, test;
};

/// Oriented sinusoidal gratings with a random phase per sample: class k has
/// orientation pi*k/K and one of two spatial frequencies, tinted per class,
/// plus Gaussian pixel noise. Labels are balanced (i mod K) before shuffling.
Dataset generate_classification_dataset(const DatasetSpec& spec);
/// High-resolution textures (sinusoids plus rectangles, in [0, 1]) and their
/// box-filtered downsamples: LR[y,x] = mean of the s*s HR block.
Dataset generate_sr_dataset(const DatasetSpec& spec);
Dataset generate_dataset(const DatasetSpec& spec);

Split gather(const Split& split, std::span<const std::size_t> indices);

/// Endless shuffled minibatch indices; reshuffles at every epoch boundary.
class BatchSampler {
 public:
  BatchSampler(std::size_t n, std::size_t batch, std::uint64_t seed);
  std::vector<std::size_t> next();

 private:
  std::vector<std::size_t> order_;
  std::size_t batch_;
  std::size_t cursor_ = 0;
  Rng rng_;
};

struct PsnrResult {
  double db = 0.0;
  bool exact = false;  ///< identical images; db is capped
};

inline constexpr double kPsnrCapDb = 99.0;

/// 10*log10(peak^2 / MSE), capped at 99 dB.
PsnrResult psnr(const Tensor& pred, const Tensor& target, double peak = 1.0);

struct TrainConfig {
  int epochs = 10;
  double lr = 0.01;
  double weight_decay = 1e-4;
  int batch_size = 32;
  std::uint64_t seed = 42;
};

struct EvalMetrics {
  double loss = 0.0;
  double accuracy = 0.0;  ///< classification, fraction in [0, 1]
  double psnr_db = 0.0;   ///< super-resolution, mean over samples
  std::size_t samples = 0;
};

/// Task loss of `output` against the batch: CE for classification, MSE for SR.
LossResult task_loss(Task task, const Tensor& output, const Split& batch);

/// Plain SGD with weight decay over the train split; returns the mean loss
/// of every epoch.
std::vector<double> train_compact(Network& net, const Dataset& data, const TrainConfig& config);
EvalMetrics evaluate(Network& net, const Split& split, Task task, std::size_t batch_size = 64);

}  // namespace hwnas
