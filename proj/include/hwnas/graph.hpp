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

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hwnas {

/// Feature-map shape of a single sample, channels-first.
struct TensorShape {
  int channels = 1;
  int height = 1;
  int width = 1;

  bool valid() const { return channels >= 1 && height >= 1 && width >= 1; }
  std::int64_t elements() const {
    return std::int64_t{channels} * height * width;
  }
  auto operator<=>(const TensorShape&) const = default;
};

std::string to_string(const TensorShape& shape);

enum class OpKind {
  kConv,
  kDWConv,
  kPointwiseConv,
  kMBConv,
  kAvgPool,
  kMaxPool,
  kIdentity,
  kReLU,
  kLeakyReLU,
  kUpsampleNearest,
  kUpsampleBilinear,
  kDepthToSpace,
  kLinear,
};

inline constexpr int kNumOpKinds = 13;

std::string_view to_string(OpKind kind);
std::optional<OpKind> op_kind_from_string(std::string_view name);

/// Kinds that hold a convolution weight (target of the channel-granularity rule).
bool is_conv_family(OpKind kind);
/// Kinds whose kernel must be 1.
bool is_non_spatial(OpKind kind);

/// Positive rational kept in lowest terms.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  /// "6" or "3/2".
  std::string str() const;
  static std::optional<Rational> parse(std::string_view text);

  bool operator==(const Rational&) const = default;

 private:
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
};

/// Descriptor of one candidate operator. Fields that do not apply to a kind
/// keep their neutral value (kernel 1, expand 1, slope 0, scale 1).
struct OperatorSpec {
  OpKind kind = OpKind::kIdentity;
  int kernel = 1;
  int stride = 1;
  int in_channels = 1;
  int out_channels = 1;
  Rational expand_ratio{1};
  double activation_slope = 0.0;
  int scale_factor = 1;
  /// LeakyReLU only: slope is a learnable per-channel vector (PReLU-style).
  bool per_channel_slope = false;

  bool operator==(const OperatorSpec&) const = default;

  /// MBConv hidden width in_channels * expand_ratio (in_channels otherwise).
  int hidden_channels() const;
};

namespace ops {
OperatorSpec conv(int kernel, int stride, int in_channels, int out_channels);
OperatorSpec dwconv(int kernel, int stride, int channels);
OperatorSpec pointwise(int in_channels, int out_channels, int stride = 1);
OperatorSpec mbconv(int kernel, int stride, int in_channels, int out_channels, Rational expand);
OperatorSpec avg_pool(int kernel, int stride, int channels);
OperatorSpec max_pool(int kernel, int stride, int channels);
OperatorSpec identity(int channels);
OperatorSpec relu(int channels);
OperatorSpec leaky_relu(int channels, double slope, bool per_channel = false);
OperatorSpec upsample_nearest(int channels, int scale);
OperatorSpec upsample_bilinear(int channels, int scale);
OperatorSpec depth_to_space(int in_channels, int scale);
OperatorSpec linear(int in_features, int out_features);
}  // namespace ops

/// Type-level invariant violations of `op` (empty when valid).
std::vector<std::string> op_violations(const OperatorSpec& op);

/// Output shape of `op` applied to `input`, or nullopt (with a reason in
/// `why`) when the op is invalid or does not accept that input.
/// Spatial ops use symmetric zero padding (kernel-1)/2, so the output size is
/// floor((in + 2*pad - kernel) / stride) + 1.
std::optional<TensorShape> try_output_shape(const OperatorSpec& op, const TensorShape& input,
                                            std::string* why = nullptr);
/// Throws Error(kInvalidOp) where try_output_shape returns nullopt.
TensorShape output_shape(const OperatorSpec& op, const TensorShape& input);

/// LUT key: `kind:k{K}:s{S}:e{E}:i{C}x{H}x{W}:o{C'}`, followed by `:a{slope}`
/// when the slope is non-zero, `:pc` for per-channel slopes and `:x{scale}`
/// when the scale factor is not 1.
std::string canonical_key(const OperatorSpec& op, const TensorShape& input);

/// A stage candidate: usually a single operator, optionally a short chain
/// (e.g. pointwise expand followed by DepthToSpace).
using Candidate = std::vector<OperatorSpec>;

struct MixedStage {
  std::vector<Candidate> candidates;
  TensorShape input_shape;
  TensorShape output_shape;

  bool operator==(const MixedStage&) const = default;
};

enum class Task { kClassification, kSuperResolution };
std::string_view to_string(Task task);

struct SuperNet {
  Task task = Task::kClassification;
  TensorShape input_shape;
  std::vector<OperatorSpec> stem;
  std::vector<MixedStage> stages;
  std::vector<OperatorSpec> head;
  std::optional<int> num_classes;
  std::optional<int> sr_scale;

  bool operator==(const SuperNet&) const = default;
};

/// How a compact net was cut out of its supernet.
struct Derivation {
  std::vector<int> choices;
  std::vector<bool> ties;

  bool operator==(const Derivation&) const = default;
};

struct CompactNet {
  Task task = Task::kClassification;
  TensorShape input_shape;
  std::vector<OperatorSpec> layers;
  std::optional<int> num_classes;
  std::optional<int> sr_scale;
  std::optional<Derivation> derivation;

  bool operator==(const CompactNet&) const = default;
};

/// Builds a stage whose input/output shapes are taken from the first
/// candidate applied to `input`.
MixedStage make_stage(std::vector<Candidate> candidates, const TensorShape& input);

/// Output shape after every stem layer, stage and head layer (in that order).
/// Throws ShapeMismatchError(stage, candidate) on disagreement, with
/// stage == -1 for stem/head layers.
std::vector<TensorShape> infer_shapes(const SuperNet& net);
/// Output shape after every layer.
std::vector<TensorShape> infer_shapes(const CompactNet& net);

/// Compact net made of `choices[i]` in every stage.
CompactNet compose(const SuperNet& net, const std::vector<int>& choices);

struct ValidationFinding {
  enum class Kind { kInvariantViolation, kShapeMismatch, kStructure };
  Kind kind;
  std::string location;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool ok() const { return findings.empty(); }
  std::size_t count(ValidationFinding::Kind kind) const;
  std::string summary() const;
};

ValidationReport validate(const SuperNet& net);
ValidationReport validate(const CompactNet& net);

std::string serialize(const SuperNet& net);
std::string serialize(const CompactNet& net);
SuperNet deserialize_supernet(std::string_view text);
CompactNet deserialize_compact(std::string_view text);
/// Dispatches on the presence of `stages` (supernet) or `layers` (compact).
std::variant<SuperNet, CompactNet> deserialize_network(std::string_view text);

SuperNet load_supernet(const std::string& path);
CompactNet load_compact(const std::string& path);
void save_text(const std::string& path, std::string_view text);
std::string read_text(const std::string& path);

}  // namespace hwnas
