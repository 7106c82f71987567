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

#include <array>
#include <charconv>
#include <cmath>
#include <numeric>

#include "common/format.hpp"
#include "hwnas/error.hpp"
#include "hwnas/graph.hpp"

namespace hwnas {

namespace {

constexpr std::array<std::string_view, kNumOpKinds> kKindNames = {
    "Conv",      "DWConv",  "PointwiseConv",   "MBConv",           "AvgPool",
    "MaxPool",   "Identity", "ReLU",           "LeakyReLU",        "UpsampleNearest",
    "UpsampleBilinear", "DepthToSpace", "Linear",
};

bool is_upsample(OpKind kind) {
  return kind == OpKind::kUpsampleNearest || kind == OpKind::kUpsampleBilinear;
}

bool is_channel_preserving(OpKind kind) {
  switch (kind) {
    case OpKind::kDWConv:
    case OpKind::kAvgPool:
    case OpKind::kMaxPool:
    case OpKind::kIdentity:
    case OpKind::kReLU:
    case OpKind::kLeakyReLU:
    case OpKind::kUpsampleNearest:
    case OpKind::kUpsampleBilinear:
      return true;
    default:
      return false;
  }
}

bool allows_stride(OpKind kind) {
  switch (kind) {
    case OpKind::kConv:
    case OpKind::kDWConv:
    case OpKind::kPointwiseConv:
    case OpKind::kMBConv:
    case OpKind::kAvgPool:
    case OpKind::kMaxPool:
      return true;
    default:
      return false;
  }
}

int spatial_out(int in, int kernel, int stride) {
  const int pad = (kernel - 1) / 2;
  return (in + 2 * pad - kernel) / stride + 1;
}

}  // namespace

std::string to_string(const TensorShape& shape) {
  return "(" + std::to_string(shape.channels) + "," + std::to_string(shape.height) + "," +
         std::to_string(shape.width) + ")";
}

std::string_view to_string(OpKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<OpKind> op_kind_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<OpKind>(i);
  }
  return std::nullopt;
}

bool is_conv_family(OpKind kind) {
  return kind == OpKind::kConv || kind == OpKind::kDWConv || kind == OpKind::kPointwiseConv ||
         kind == OpKind::kMBConv;
}

bool is_non_spatial(OpKind kind) {
  switch (kind) {
    case OpKind::kIdentity:
    case OpKind::kReLU:
    case OpKind::kLeakyReLU:
    case OpKind::kPointwiseConv:
    case OpKind::kLinear:
    case OpKind::kUpsampleNearest:
    case OpKind::kUpsampleBilinear:
    case OpKind::kDepthToSpace:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(Task task) {
  return task == Task::kClassification ? "Classification" : "SuperResolution";
}

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (num <= 0 || den <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "rational must be positive: " +
                                                 std::to_string(num) + "/" + std::to_string(den));
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / g;
  den_ = den / g;
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> Rational::parse(std::string_view text) {
  auto parse_int = [](std::string_view s) -> std::optional<std::int64_t> {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v <= 0) return std::nullopt;
    return v;
  };
  const auto slash = text.find('/');
  auto num = parse_int(text.substr(0, slash));
  if (!num) return std::nullopt;
  std::int64_t den = 1;
  if (slash != std::string_view::npos) {
    auto d = parse_int(text.substr(slash + 1));
    if (!d) return std::nullopt;
    den = *d;
  }
  return Rational(*num, den);
}

int OperatorSpec::hidden_channels() const {
  if (kind != OpKind::kMBConv) return in_channels;
  return static_cast<int>(in_channels * expand_ratio.num() / expand_ratio.den());
}

namespace ops {

OperatorSpec conv(int kernel, int stride, int in_channels, int out_channels) {
  return {.kind = OpKind::kConv, .kernel = kernel, .stride = stride,
          .in_channels = in_channels, .out_channels = out_channels};
}
OperatorSpec dwconv(int kernel, int stride, int channels) {
  return {.kind = OpKind::kDWConv, .kernel = kernel, .stride = stride,
          .in_channels = channels, .out_channels = channels};
}
OperatorSpec pointwise(int in_channels, int out_channels, int stride) {
  return {.kind = OpKind::kPointwiseConv, .stride = stride, .in_channels = in_channels,
          .out_channels = out_channels};
}
OperatorSpec mbconv(int kernel, int stride, int in_channels, int out_channels, Rational expand) {
  return {.kind = OpKind::kMBConv, .kernel = kernel, .stride = stride,
          .in_channels = in_channels, .out_channels = out_channels, .expand_ratio = expand};
}
OperatorSpec avg_pool(int kernel, int stride, int channels) {
  return {.kind = OpKind::kAvgPool, .kernel = kernel, .stride = stride,
          .in_channels = channels, .out_channels = channels};
}
OperatorSpec max_pool(int kernel, int stride, int channels) {
  return {.kind = OpKind::kMaxPool, .kernel = kernel, .stride = stride,
          .in_channels = channels, .out_channels = channels};
}
OperatorSpec identity(int channels) {
  return {.kind = OpKind::kIdentity, .in_channels = channels, .out_channels = channels};
}
OperatorSpec relu(int channels) {
  return {.kind = OpKind::kReLU, .in_channels = channels, .out_channels = channels};
}
OperatorSpec leaky_relu(int channels, double slope, bool per_channel) {
  return {.kind = OpKind::kLeakyReLU, .in_channels = channels, .out_channels = channels,
          .activation_slope = slope, .per_channel_slope = per_channel};
}
OperatorSpec upsample_nearest(int channels, int scale) {
  return {.kind = OpKind::kUpsampleNearest, .in_channels = channels, .out_channels = channels,
          .scale_factor = scale};
}
OperatorSpec upsample_bilinear(int channels, int scale) {
  return {.kind = OpKind::kUpsampleBilinear, .in_channels = channels, .out_channels = channels,
          .scale_factor = scale};
}
OperatorSpec depth_to_space(int in_channels, int scale) {
  return {.kind = OpKind::kDepthToSpace, .in_channels = in_channels,
          .out_channels = in_channels / (scale * scale), .scale_factor = scale};
}
OperatorSpec linear(int in_features, int out_features) {
  return {.kind = OpKind::kLinear, .in_channels = in_features, .out_channels = out_features};
}

}  // namespace ops

std::vector<std::string> op_violations(const OperatorSpec& op) {
  std::vector<std::string> out;
  const auto kind = std::string(to_string(op.kind));
  if (op.kernel < 1 || op.kernel % 2 == 0) out.push_back(kind + ": kernel must be odd and positive");
  if (op.stride < 1) out.push_back(kind + ": stride must be positive");
  if (op.in_channels < 1 || op.out_channels < 1) out.push_back(kind + ": channels must be positive");
  if (op.scale_factor < 1) out.push_back(kind + ": scale_factor must be positive");
  if (!std::isfinite(op.activation_slope) || op.activation_slope < 0.0) {
    out.push_back(kind + ": activation_slope must be finite and non-negative");
  }
  if (!out.empty()) return out;

  if (is_non_spatial(op.kind) && op.kernel != 1) out.push_back(kind + " requires kernel 1");
  if (!allows_stride(op.kind) && op.stride != 1) out.push_back(kind + " requires stride 1");
  if (is_channel_preserving(op.kind) && op.in_channels != op.out_channels) {
    out.push_back(kind + " requires in_channels == out_channels");
  }
  if (op.kind != OpKind::kMBConv && op.expand_ratio != Rational(1)) {
    out.push_back(kind + ": expand_ratio applies to MBConv only");
  }
  if (op.kind == OpKind::kMBConv &&
      (std::int64_t{op.in_channels} * op.expand_ratio.num()) % op.expand_ratio.den() != 0) {
    out.push_back("MBConv: in_channels * expand_ratio must be an integer");
  }
  if (op.kind != OpKind::kLeakyReLU && (op.activation_slope != 0.0 || op.per_channel_slope)) {
    out.push_back(kind + ": activation_slope applies to LeakyReLU only");
  }
  const bool scaled = is_upsample(op.kind) || op.kind == OpKind::kDepthToSpace;
  if (!scaled && op.scale_factor != 1) out.push_back(kind + ": scale_factor applies to upsampling only");
  if (op.kind == OpKind::kDepthToSpace) {
    const int block = op.scale_factor * op.scale_factor;
    if (op.in_channels % block != 0) {
      out.push_back("DepthToSpace requires in_channels divisible by scale_factor^2");
    } else if (op.out_channels != op.in_channels / block) {
      out.push_back("DepthToSpace requires out_channels == in_channels / scale_factor^2");
    }
  }
  return out;
}

std::optional<TensorShape> try_output_shape(const OperatorSpec& op, const TensorShape& input,
                                            std::string* why) {
  auto fail = [why](std::string reason) -> std::optional<TensorShape> {
    if (why) *why = std::move(reason);
    return std::nullopt;
  };
  if (!input.valid()) return fail("input shape " + to_string(input) + " is not positive");
  if (auto v = op_violations(op); !v.empty()) return fail(v.front());

  if (op.kind == OpKind::kLinear) {
    if (op.in_channels != input.elements()) {
      return fail("Linear in_channels " + std::to_string(op.in_channels) +
                  " != flattened input " + std::to_string(input.elements()));
    }
    return TensorShape{op.out_channels, 1, 1};
  }
  if (op.in_channels != input.channels) {
    return fail(std::string(to_string(op.kind)) + " in_channels " +
                std::to_string(op.in_channels) + " != input channels " +
                std::to_string(input.channels));
  }
  switch (op.kind) {
    case OpKind::kConv:
    case OpKind::kDWConv:
    case OpKind::kPointwiseConv:
    case OpKind::kMBConv:
    case OpKind::kAvgPool:
    case OpKind::kMaxPool:
      return TensorShape{op.out_channels, spatial_out(input.height, op.kernel, op.stride),
                         spatial_out(input.width, op.kernel, op.stride)};
    case OpKind::kIdentity:
    case OpKind::kReLU:
    case OpKind::kLeakyReLU:
      return input;
    case OpKind::kUpsampleNearest:
    case OpKind::kUpsampleBilinear:
    case OpKind::kDepthToSpace:
      return TensorShape{op.out_channels, input.height * op.scale_factor,
                         input.width * op.scale_factor};
    case OpKind::kLinear:
      break;
  }
  return fail("unhandled kind");
}

TensorShape output_shape(const OperatorSpec& op, const TensorShape& input) {
  std::string why;
  auto out = try_output_shape(op, input, &why);
  if (!out) throw Error(ErrorCode::kInvalidOp, why);
  return *out;
}

std::string canonical_key(const OperatorSpec& op, const TensorShape& input) {
  std::string why;
  if (!try_output_shape(op, input, &why)) throw Error(ErrorCode::kInvalidOp, why);
  std::string key;
  key.reserve(64);
  key += to_string(op.kind);
  key += ":k" + std::to_string(op.kernel);
  key += ":s" + std::to_string(op.stride);
  key += ":e" + op.expand_ratio.str();
  key += ":i" + std::to_string(input.channels) + "x" + std::to_string(input.height) + "x" +
         std::to_string(input.width);
  key += ":o" + std::to_string(op.out_channels);
  if (op.activation_slope != 0.0) key += ":a" + format_double(op.activation_slope);
  if (op.per_channel_slope) key += ":pc";
  if (op.scale_factor != 1) key += ":x" + std::to_string(op.scale_factor);
  return key;
}

}  // namespace hwnas
