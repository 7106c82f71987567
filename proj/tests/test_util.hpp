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

#include <utility>
#include <vector>

#include "hwnas/graph.hpp"
#include "hwnas/rng.hpp"

namespace hwnas::testing {

/// Random valid supernet: a conv stem, 1-4 stages of shape-preserving or
/// downsampling candidates and an optional head.
inline SuperNet random_supernet(Rng& rng) {
  static constexpr int kChannels[] = {4, 8, 16, 24};
  SuperNet net;
  net.task = Task::kClassification;
  const int size = 8 * rng.uniform_int(1, 3);
  net.input_shape = {3, size, size};
  int c = kChannels[rng.below(4)];
  net.stem = {ops::conv(3, 1, 3, c)};
  TensorShape shape{c, size, size};
  const int stages = rng.uniform_int(1, 4);
  for (int s = 0; s < stages; ++s) {
    std::vector<Candidate> cands;
    if (rng.below(3) == 0 && shape.height >= 4) {
      const int out = kChannels[rng.below(4)];
      cands.push_back({ops::conv(3, 2, c, out)});
      cands.push_back({ops::mbconv(5, 2, c, out, Rational(rng.uniform_int(1, 6), rng.uniform_int(1, 2)))});
      cands.push_back({ops::dwconv(3, 2, c), ops::pointwise(c, out)});
      c = out;
    } else {
      cands.push_back({ops::identity(c)});
      cands.push_back({ops::conv(1 + 2 * rng.uniform_int(0, 3), 1, c, c)});
      cands.push_back({ops::leaky_relu(c, 0.125 * rng.uniform_int(0, 4), rng.below(2) == 0)});
      cands.push_back({ops::max_pool(3, 1, c)});
    }
    MixedStage stage = make_stage(std::move(cands), shape);
    shape = stage.output_shape;
    net.stages.push_back(std::move(stage));
  }
  net.head = {ops::avg_pool(3, 2, c)};
  const TensorShape pooled = output_shape(net.head[0], shape);
  net.head.push_back(ops::linear(static_cast<int>(pooled.elements()), 10));
  net.num_classes = 10;
  return net;
}

/// One small (op, input) instance of every operator kind, plus the
/// per-channel and strided variants that take separate code paths.
inline std::vector<std::pair<OperatorSpec, TensorShape>> kind_fixtures() {
  return {
      {ops::conv(3, 2, 3, 4), {3, 6, 6}},
      {ops::conv(5, 1, 2, 3), {2, 5, 5}},
      {ops::dwconv(3, 1, 4), {4, 5, 5}},
      {ops::dwconv(5, 2, 3), {3, 6, 6}},
      {ops::pointwise(4, 6), {4, 4, 4}},
      {ops::mbconv(3, 1, 4, 4, Rational(3)), {4, 5, 5}},
      {ops::mbconv(3, 1, 2, 2, Rational(6)), {2, 4, 4}},
      {ops::mbconv(5, 2, 4, 8, Rational(3, 2)), {4, 6, 6}},
      {ops::avg_pool(3, 2, 3), {3, 6, 6}},
      {ops::max_pool(3, 1, 3), {3, 5, 5}},
      {ops::identity(3), {3, 4, 4}},
      {ops::relu(3), {3, 4, 4}},
      {ops::leaky_relu(3, 0.2), {3, 4, 4}},
      {ops::leaky_relu(3, 0.25, true), {3, 4, 4}},
      {ops::upsample_nearest(2, 2), {2, 3, 3}},
      {ops::upsample_bilinear(2, 2), {2, 3, 4}},
      {ops::depth_to_space(8, 2), {8, 3, 3}},
      {ops::linear(12, 5), {3, 2, 2}},
  };
}

}  // namespace hwnas::testing
