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

#include "hwnas/spaces.hpp"

#include "hwnas/error.hpp"

namespace hwnas::spaces {

namespace {

Candidate one(OperatorSpec op) { return {op}; }

}  // namespace

SuperNet toy_classification(int channels, int image, int num_classes) {
  const int c = channels;
  SuperNet net;
  net.task = Task::kClassification;
  net.input_shape = {3, image, image};
  net.num_classes = num_classes;
  net.stem = {ops::conv(3, 1, 3, c), ops::relu(c)};
  TensorShape shape{c, image, image};
  for (int s = 0; s < 3; ++s) {
    net.stages.push_back(make_stage(
        {one(ops::mbconv(3, 1, c, c, Rational(3))), one(ops::mbconv(5, 1, c, c, Rational(3))), one(ops::identity(c))},
        shape));
  }
  const int pooled = (image - 1) / 2 + 1;
  net.head = {ops::avg_pool(3, 2, c), ops::linear(c * pooled * pooled, num_classes)};
  return net;
}

SuperNet toy_sr(int channels, int image) {
  const int c = channels;
  SuperNet net;
  net.task = Task::kSuperResolution;
  net.input_shape = {3, image, image};
  net.sr_scale = 2;
  net.stem = {ops::conv(3, 1, 3, c)};
  const TensorShape lr{c, image, image};
  net.stages.push_back(make_stage({one(ops::relu(c)), one(ops::leaky_relu(c, 0.25, true))}, lr));
  net.stages.push_back(
      make_stage({one(ops::conv(1, 1, c, c)), one(ops::conv(3, 1, c, c)), one(ops::conv(5, 1, c, c))}, lr));
  net.stages.push_back(make_stage({one(ops::upsample_nearest(c, 2)), one(ops::upsample_bilinear(c, 2)),
                                   {ops::pointwise(c, 4 * c), ops::depth_to_space(4 * c, 2)}},
                                  lr));
  net.head = {ops::conv(3, 1, c, 3)};
  return net;
}

SuperNet mobile() {
  SuperNet net;
  net.task = Task::kClassification;
  net.input_shape = {3, 256, 256};
  net.num_classes = 10;
  net.stem = {ops::conv(7, 2, 3, 32)};
  const Rational e3(3), e6(6);
  net.stages.push_back(make_stage({one(ops::mbconv(3, 1, 32, 32, e3)), one(ops::mbconv(5, 1, 32, 32, e3)),
                                   one(ops::mbconv(3, 1, 32, 32, e6)), one(ops::identity(32))},
                                  {32, 128, 128}));
  net.stages.push_back(make_stage({one(ops::mbconv(3, 2, 32, 48, e3)), one(ops::mbconv(5, 2, 32, 48, e6)),
                                   one(ops::conv(3, 2, 32, 48))},
                                  {32, 128, 128}));
  net.stages.push_back(make_stage({one(ops::mbconv(3, 1, 48, 48, e3)), one(ops::mbconv(5, 1, 48, 48, e6)),
                                   one(ops::dwconv(3, 1, 48)), one(ops::identity(48))},
                                  {48, 64, 64}));
  net.stages.push_back(make_stage({one(ops::mbconv(3, 2, 48, 64, e6)), one(ops::mbconv(5, 2, 48, 64, e3)),
                                   one(ops::conv(3, 2, 48, 64))},
                                  {48, 64, 64}));
  net.stages.push_back(make_stage({one(ops::mbconv(3, 1, 64, 64, e6)), one(ops::mbconv(7, 1, 64, 64, e6)),
                                   one(ops::identity(64))},
                                  {64, 32, 32}));
  net.head = {ops::avg_pool(3, 2, 64), ops::linear(64 * 16 * 16, 10)};
  return net;
}

std::vector<std::string_view> names() { return {"toy-classification", "toy-sr", "mobile"}; }

SuperNet by_name(std::string_view name) {
  if (name == "toy-classification") return toy_classification();
  if (name == "toy-sr") return toy_sr();
  if (name == "mobile") return mobile();
  throw Error(ErrorCode::kInvalidArgument, "unknown search space '" + std::string(name) + "'");
}

}  // namespace hwnas::spaces
