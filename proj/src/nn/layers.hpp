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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hwnas/nn.hpp"

namespace hwnas::nn {

/// Primitive differentiable layer. forward() retains what backward() needs.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x) = 0;
  virtual Tensor backward(const Tensor& dy) = 0;
  virtual void collect(const std::string& prefix, std::vector<NamedParameter>& out) {
    (void)prefix;
    (void)out;
  }
  virtual void clear() {}
};

struct ConvGeometry {
  int in_channels, out_channels, kernel, stride, groups;
  TensorShape input;
};

std::unique_ptr<Layer> make_conv(const ConvGeometry& g, bool bias, Rng& rng);
std::unique_ptr<Layer> make_affine(int channels);
std::unique_ptr<Layer> make_relu();
std::unique_ptr<Layer> make_leaky_relu(int channels, double slope, bool per_channel);
std::unique_ptr<Layer> make_avg_pool(int kernel, int stride);
std::unique_ptr<Layer> make_max_pool(int kernel, int stride);
std::unique_ptr<Layer> make_upsample_nearest(int scale);
std::unique_ptr<Layer> make_upsample_bilinear(int scale);
std::unique_ptr<Layer> make_depth_to_space(int scale);
std::unique_ptr<Layer> make_linear(int in_features, int out_features, Rng& rng);
std::unique_ptr<Layer> make_identity();

}  // namespace hwnas::nn
