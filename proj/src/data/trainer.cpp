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
#include <numeric>

#include "hwnas/data.hpp"
#include "hwnas/error.hpp"

namespace hwnas {

LossResult task_loss(Task task, const Tensor& output, const Split& batch) {
  if (task == Task::kClassification) return loss_ce(output, batch.labels);
  return loss_mse(output, batch.targets);
}

std::vector<double> train_compact(Network& net, const Dataset& data, const TrainConfig& config) {
  if (config.epochs < 0 || config.batch_size <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "train_compact: bad epochs or batch size");
  }
  const std::size_t n = data.train.size();
  if (n == 0) throw Error(ErrorCode::kEmptySet, "train_compact: empty train split");
  const auto batch = static_cast<std::size_t>(config.batch_size);
  auto params = net.parameter_ptrs();
  Rng rng(config.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> epoch_losses;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t count = std::min(batch, n - start);
      const Split b = gather(data.train, std::span(order).subspan(start, count));
      const Tensor out = net.forward(b.inputs);
      const LossResult loss = task_loss(data.task, out, b);
      if (!std::isfinite(loss.value)) {
        throw Error(ErrorCode::kNonFiniteLoss, "train_compact: non-finite loss at epoch " +
                                                   std::to_string(epoch));
      }
      net.backward(loss.grad);
      sgd_step(params, config.lr, config.weight_decay);
      total += loss.value * static_cast<double>(count);
    }
    epoch_losses.push_back(total / static_cast<double>(n));
  }
  return epoch_losses;
}

EvalMetrics evaluate(Network& net, const Split& split, Task task, std::size_t batch_size) {
  const std::size_t n = split.size();
  if (n == 0) throw Error(ErrorCode::kEmptySet, "evaluate: empty split");
  batch_size = std::max<std::size_t>(batch_size, 1);
  EvalMetrics m;
  m.samples = n;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t correct = 0;
  double loss = 0.0, psnr_sum = 0.0;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t count = std::min(batch_size, n - start);
    const Split b = gather(split, std::span(idx).subspan(start, count));
    const Tensor out = net.forward(b.inputs);
    net.clear_state();
    loss += task_loss(task, out, b).value * static_cast<double>(count);
    const std::size_t per = out.size() / count;
    if (task == Task::kClassification) {
      for (std::size_t i = 0; i < count; ++i) {
        const double* row = out.raw() + i * per;
        const auto best = static_cast<int>(std::max_element(row, row + per) - row);
        if (best == b.labels[i]) ++correct;
      }
    } else {
      auto sample_dims = out.dims();
      sample_dims[0] = 1;
      for (std::size_t i = 0; i < count; ++i) {
        Tensor p(sample_dims, std::vector<double>(out.raw() + i * per, out.raw() + (i + 1) * per));
        Tensor t(sample_dims, std::vector<double>(b.targets.raw() + i * per, b.targets.raw() + (i + 1) * per));
        psnr_sum += psnr(p, t).db;
      }
    }
  }
  m.loss = loss / static_cast<double>(n);
  m.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  m.psnr_db = task == Task::kSuperResolution ? psnr_sum / static_cast<double>(n) : 0.0;
  return m;
}

}  // namespace hwnas
