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

#include "hwnas/data.hpp"
#include "hwnas/error.hpp"

namespace hwnas {

PsnrResult psnr(const Tensor& pred, const Tensor& target, double peak) {
  if (!pred.same_dims(target)) {
    throw Error(ErrorCode::kShapeMismatch, "psnr: " + dims_to_string(pred.dims()) + " vs " +
                                               dims_to_string(target.dims()));
  }
  if (!(peak > 0.0)) throw Error(ErrorCode::kInvalidArgument, "psnr: peak must be positive");
  if (pred.size() == 0) throw Error(ErrorCode::kEmptySet, "psnr: empty tensors");
  double sse = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(pred.size());
  if (mse == 0.0) return {kPsnrCapDb, true};
  return {std::min(kPsnrCapDb, 10.0 * std::log10(peak * peak / mse)), false};
}

}  // namespace hwnas
