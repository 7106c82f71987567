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
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hwnas/graph.hpp"
#include "hwnas/rng.hpp"
#include "hwnas/tensor.hpp"

namespace hwnas {

struct Parameter {
  Tensor value;
  Tensor grad;

  explicit Parameter(std::vector<std::size_t> dims)
      : value(dims), grad(std::move(dims)) {}
  void zero_grad() { grad.fill(0.0); }
};

using NamedParameter = std::pair<std::string, Parameter*>;

namespace nn {
class Layer;
}

/// Executable instance of one OperatorSpec with its own weights.
///
/// Parameter layout per kind (weights are [out, in/groups, k, k]):
///   Conv, PointwiseConv   weight, bias[out]
///   DWConv                weight [C,1,k,k], bias[C]
///   Linear                weight [out,in], bias[out]
///   LeakyReLU per-channel slope[C]
///   MBConv                expand.{weight,scale,bias}, depthwise.{weight,scale,bias},
///                         project.{weight,scale,bias}
/// MBConv is expand 1x1 -> affine -> ReLU -> depthwise kxk/s -> affine -> ReLU
/// -> project 1x1 -> affine, plus the input when in == out and stride == 1.
/// The per-channel affine (scale, bias) stands in for batch normalization.
class ModuleInstance {
 public:
  /// Kaiming-uniform fan-in weights, zero biases, unit scales.
  ModuleInstance(const OperatorSpec& spec, const TensorShape& input, Rng& rng);
  ModuleInstance(ModuleInstance&&) noexcept;
  ModuleInstance& operator=(ModuleInstance&&) noexcept;
  ~ModuleInstance();

  const OperatorSpec& spec() const { return spec_; }
  const TensorShape& input_shape() const { return input_; }
  const TensorShape& output_shape() const { return output_; }

  /// `input` is [batch, C, H, W] matching input_shape(); activations are
  /// retained for the next backward().
  Tensor forward(const Tensor& input);
  /// Accumulates into Parameter::grad and returns the input gradient.
  /// Throws Error(kStaleState) without a retained forward.
  Tensor backward(const Tensor& upstream);

  std::vector<NamedParameter> parameters();
  std::size_t parameter_count() const;
  bool has_retained_state() const { return retained_; }
  void clear_state();

 private:
  OperatorSpec spec_;
  TensorShape input_;
  TensorShape output_;
  std::vector<std::unique_ptr<nn::Layer>> layers_;
  std::vector<std::string> prefixes_;
  bool residual_ = false;
  bool retained_ = false;
  std::size_t batch_ = 0;
};

/// c_in*h + h*k^2 + h*c_out + 2*(h + h + c_out), h = c_in * expand.
std::size_t mbconv_parameter_count(int in_channels, int out_channels, int kernel, Rational expand);

struct LossResult {
  double value = 0.0;
  Tensor grad;
};

/// Mean over the batch of -log softmax(logits)[label]; logits are
/// [batch, classes] or [batch, classes, 1, 1].
LossResult loss_ce(const Tensor& logits, std::span<const int> labels);
/// Mean squared error over all elements.
LossResult loss_mse(const Tensor& pred, const Tensor& target);

/// value -= lr * (grad + 2 * weight_decay * value); grads are zeroed after.
/// The decay term is the gradient of weight_decay * ||w||^2.
void sgd_step(std::span<Parameter* const> params, double lr, double weight_decay);
double squared_norm(std::span<Parameter* const> params);
void zero_grads(std::span<Parameter* const> params);

class Adam {
 public:
  /// `weight_decay` is decoupled (AdamW): value -= lr * weight_decay * value.
  explicit Adam(double lr, double weight_decay = 0.0, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), weight_decay_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  /// Parameters must be passed in the same order on every call.
  void step(std::span<Parameter* const> params);
  void set_lr(double lr) { lr_ = lr; }

 private:
  double lr_, weight_decay_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

struct GradCheckOptions {
  double step = 1e-3;
  std::size_t batch = 2;
  std::uint64_t seed = 7;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst;  ///< name of the coordinate with the largest error
  std::size_t checked = 0;
  /// Coordinates skipped because the one-sided differences disagree, i.e.
  /// the perturbation crosses a ReLU/max-pool kink.
  std::size_t skipped_kinks = 0;
};

/// Compares every parameter and input gradient against central finite
/// differences of the probe loss sum(r * forward(x)), with random x and r.
/// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
GradCheckReport grad_check(ModuleInstance& instance, const GradCheckOptions& options = {});

/// Sequential stack of module instances (a compact network).
class Network {
 public:
  Network(const CompactNet& net, std::uint64_t seed);

  Tensor forward(const Tensor& input);
  Tensor backward(const Tensor& upstream);
  /// Drops retained activations (after a forward-only pass).
  void clear_state();
  std::vector<NamedParameter> parameters();
  std::vector<Parameter*> parameter_ptrs();
  std::size_t size() const { return modules_.size(); }
  const CompactNet& net() const { return net_; }

 private:
  CompactNet net_;
  std::vector<ModuleInstance> modules_;
};

/// Versioned JSON: {"format":"hwnas.checkpoint","version":1,
///   "parameters":{name:{"dims":[...],"data":[...]}}}
std::string checkpoint_to_json(std::span<const NamedParameter> params);
/// Loads values into `params` by name; every name must be present with
/// matching dims.
void checkpoint_from_json(std::string_view text, std::span<const NamedParameter> params);

}  // namespace hwnas
