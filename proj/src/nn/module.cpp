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

#include <numeric>

#include "hwnas/error.hpp"
#include "hwnas/nn.hpp"
#include "nn/layers.hpp"

namespace hwnas {

namespace {

TensorShape conv_out(const TensorShape& in, int out_channels, int kernel, int stride) {
  const int pad = (kernel - 1) / 2;
  return {out_channels, (in.height + 2 * pad - kernel) / stride + 1,
          (in.width + 2 * pad - kernel) / stride + 1};
}

}  // namespace

ModuleInstance::ModuleInstance(const OperatorSpec& spec, const TensorShape& input, Rng& rng)
    : spec_(spec), input_(input), output_(hwnas::output_shape(spec, input)) {
  auto add = [this](std::string prefix, std::unique_ptr<nn::Layer> layer) {
    prefixes_.push_back(std::move(prefix));
    layers_.push_back(std::move(layer));
  };
  const int cin = spec.in_channels, cout = spec.out_channels, k = spec.kernel, s = spec.stride;
  switch (spec.kind) {
    case OpKind::kConv:
    case OpKind::kPointwiseConv:
      add("", nn::make_conv({cin, cout, k, s, 1, input}, true, rng));
      break;
    case OpKind::kDWConv:
      add("", nn::make_conv({cin, cout, k, s, cin, input}, true, rng));
      break;
    case OpKind::kMBConv: {
      const int hidden = spec.hidden_channels();
      const TensorShape expanded{hidden, input.height, input.width};
      add("expand.", nn::make_conv({cin, hidden, 1, 1, 1, input}, false, rng));
      add("expand.", nn::make_affine(hidden));
      add("", nn::make_relu());
      add("depthwise.", nn::make_conv({hidden, hidden, k, s, hidden, expanded}, false, rng));
      add("depthwise.", nn::make_affine(hidden));
      add("", nn::make_relu());
      const TensorShape reduced = conv_out(expanded, hidden, k, s);
      add("project.", nn::make_conv({hidden, cout, 1, 1, 1, reduced}, false, rng));
      add("project.", nn::make_affine(cout));
      residual_ = cin == cout && s == 1;
      break;
    }
    case OpKind::kAvgPool:
      add("", nn::make_avg_pool(k, s));
      break;
    case OpKind::kMaxPool:
      add("", nn::make_max_pool(k, s));
      break;
    case OpKind::kIdentity:
      add("", nn::make_identity());
      break;
    case OpKind::kReLU:
      add("", nn::make_relu());
      break;
    case OpKind::kLeakyReLU:
      add("", nn::make_leaky_relu(cin, spec.activation_slope, spec.per_channel_slope));
      break;
    case OpKind::kUpsampleNearest:
      add("", nn::make_upsample_nearest(spec.scale_factor));
      break;
    case OpKind::kUpsampleBilinear:
      add("", nn::make_upsample_bilinear(spec.scale_factor));
      break;
    case OpKind::kDepthToSpace:
      add("", nn::make_depth_to_space(spec.scale_factor));
      break;
    case OpKind::kLinear:
      add("", nn::make_linear(cin, cout, rng));
      break;
  }
}

ModuleInstance::ModuleInstance(ModuleInstance&&) noexcept = default;
ModuleInstance& ModuleInstance::operator=(ModuleInstance&&) noexcept = default;
ModuleInstance::~ModuleInstance() = default;

Tensor ModuleInstance::forward(const Tensor& input) {
  if (input.rank() != 4 || input.dim(0) == 0 || input.sample_shape() != input_) {
    throw Error(ErrorCode::kShapeMismatch,
                std::string(to_string(spec_.kind)) + " expects [batch," + std::to_string(input_.channels) +
                    "," + std::to_string(input_.height) + "," + std::to_string(input_.width) +
                    "], got " + dims_to_string(input.dims()));
  }
  batch_ = input.dim(0);
  Tensor x = input;
  for (auto& layer : layers_) x = layer->forward(x);
  if (residual_) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += input[i];
  }
  retained_ = true;
  return x;
}

Tensor ModuleInstance::backward(const Tensor& upstream) {
  if (!retained_) {
    throw Error(ErrorCode::kStaleState,
                std::string(to_string(spec_.kind)) + ": backward without a retained forward");
  }
  const auto expect = Tensor::feature_map(batch_, output_);
  if (!upstream.same_dims(expect)) {
    throw Error(ErrorCode::kShapeMismatch, "upstream gradient dims " + dims_to_string(upstream.dims()) +
                                               " != output dims " + dims_to_string(expect.dims()));
  }
  Tensor g = upstream;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  if (residual_) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += upstream[i];
  }
  clear_state();
  return g;
}

void ModuleInstance::clear_state() {
  for (auto& layer : layers_) layer->clear();
  retained_ = false;
}

std::vector<NamedParameter> ModuleInstance::parameters() {
  std::vector<NamedParameter> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i]->collect(prefixes_[i], out);
  return out;
}

std::size_t ModuleInstance::parameter_count() const {
  std::size_t n = 0;
  std::vector<NamedParameter> params;
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i]->collect(prefixes_[i], params);
  for (const auto& [name, p] : params) n += p->value.size();
  return n;
}

std::size_t mbconv_parameter_count(int in_channels, int out_channels, int kernel, Rational expand) {
  const auto h = static_cast<std::size_t>(in_channels * expand.num() / expand.den());
  const auto cin = static_cast<std::size_t>(in_channels);
  const auto cout = static_cast<std::size_t>(out_channels);
  const auto k2 = static_cast<std::size_t>(kernel * kernel);
  return cin * h + h * k2 + h * cout + 2 * (h + h + cout);
}

Network::Network(const CompactNet& net, std::uint64_t seed) : net_(net) {
  TensorShape shape = net.input_shape;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    Rng rng(mix_seed(seed, i));
    modules_.emplace_back(net.layers[i], shape, rng);
    shape = modules_.back().output_shape();
  }
}

Tensor Network::forward(const Tensor& input) {
  Tensor x = input;
  for (auto& m : modules_) x = m.forward(x);
  return x;
}

Tensor Network::backward(const Tensor& upstream) {
  Tensor g = upstream;
  for (auto it = modules_.rbegin(); it != modules_.rend(); ++it) g = it->backward(g);
  return g;
}

void Network::clear_state() {
  for (auto& m : modules_) m.clear_state();
}

std::vector<NamedParameter> Network::parameters() {
  std::vector<NamedParameter> out;
  for (std::size_t i = 0; i < modules_.size(); ++i) {
    for (auto& [name, p] : modules_[i].parameters()) {
      out.emplace_back("layers[" + std::to_string(i) + "]." + name, p);
    }
  }
  return out;
}

std::vector<Parameter*> Network::parameter_ptrs() {
  std::vector<Parameter*> out;
  for (auto& [name, p] : parameters()) out.push_back(p);
  return out;
}

}  // namespace hwnas
