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

#include "hwnas/error.hpp"
#include "hwnas/nn.hpp"

namespace hwnas {

LossResult loss_ce(const Tensor& logits, std::span<const int> labels) {
  const bool ok_rank = logits.rank() == 2 || (logits.rank() == 4 && logits.dim(2) == 1 && logits.dim(3) == 1);
  if (!ok_rank || logits.dim(0) != labels.size() || labels.empty()) {
    throw Error(ErrorCode::kShapeMismatch, "logits " + dims_to_string(logits.dims()) + " vs " +
                                               std::to_string(labels.size()) + " labels");
  }
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  LossResult result{0.0, Tensor(logits.dims())};
  const double inv_batch = 1.0 / static_cast<double>(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const int label = labels[b];
    if (label < 0 || static_cast<std::size_t>(label) >= classes) {
      throw Error(ErrorCode::kShapeMismatch, "label " + std::to_string(label) + " out of range");
    }
    const double* z = logits.raw() + b * classes;
    const double zmax = *std::max_element(z, z + classes);
    double denom = 0.0;
    for (std::size_t c = 0; c < classes; ++c) denom += std::exp(z[c] - zmax);
    const double log_denom = std::log(denom);
    result.value += (log_denom - (z[label] - zmax)) * inv_batch;
    double* g = result.grad.raw() + b * classes;
    for (std::size_t c = 0; c < classes; ++c) {
      const double p = std::exp(z[c] - zmax - log_denom);
      g[c] = (p - (static_cast<int>(c) == label ? 1.0 : 0.0)) * inv_batch;
    }
  }
  return result;
}

LossResult loss_mse(const Tensor& pred, const Tensor& target) {
  if (!pred.same_dims(target) || pred.size() == 0) {
    throw Error(ErrorCode::kShapeMismatch, "pred " + dims_to_string(pred.dims()) + " vs target " +
                                               dims_to_string(target.dims()));
  }
  LossResult result{0.0, Tensor(pred.dims())};
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    result.value += d * d * inv_n;
    result.grad[i] = 2.0 * d * inv_n;
  }
  return result;
}

}  // namespace hwnas
