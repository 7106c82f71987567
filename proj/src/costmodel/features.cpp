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

#include "hwnas/costmodel.hpp"
#include "hwnas/rng.hpp"

namespace hwnas {

namespace {

double log2p1(double x) { return std::log2(1.0 + x); }

template <typename T, std::size_t N>
T pick(Rng& rng, const T (&items)[N]) {
  return items[rng.below(N)];
}

}  // namespace

FeatureVector encode_features(const OperatorSpec& op, const TensorShape& input) {
  output_shape(op, input);  // throws InvalidOp
  FeatureVector f{};
  f[static_cast<std::size_t>(op.kind)] = 1.0;
  std::size_t i = kNumOpKinds;
  f[i++] = log2p1(op.in_channels);
  f[i++] = log2p1(op.out_channels);
  f[i++] = log2p1(input.height);
  f[i++] = log2p1(input.width);
  f[i++] = log2p1(op.kernel);
  f[i++] = log2p1(op.stride);
  f[i++] = log2p1(static_cast<double>(op.expand_ratio.num()));
  f[i++] = log2p1(op.scale_factor);
  f[i] = (op.activation_slope != 0.0 || op.per_channel_slope) ? 1.0 : 0.0;
  return f;
}

std::pair<OperatorSpec, TensorShape> random_workload(Rng& rng) {
  static const int kChannels[] = {3, 4, 8, 12, 16, 24, 32, 48, 64, 96, 128};
  static const int kSizes[] = {4, 7, 8, 12, 14, 16, 28, 32, 56, 64};
  static const int kKernels[] = {3, 5, 7};
  static const int kStrides[] = {1, 2};
  const int hw = pick(rng, kSizes);
  const int cin = pick(rng, kChannels);
  const int cout = pick(rng, kChannels);
  const int k = pick(rng, kKernels);
  const int s = pick(rng, kStrides);
  const TensorShape in{cin, hw, hw};
  // Every kind except Identity, which costs nothing.
  static_assert(static_cast<int>(OpKind::kIdentity) == 6);
  const auto r = static_cast<int>(rng.below(kNumOpKinds - 1));
  switch (static_cast<OpKind>(r < 6 ? r : r + 1)) {
    case OpKind::kConv: {
      static const int kConvKernels[] = {1, 3, 5, 7};
      return {ops::conv(pick(rng, kConvKernels), s, cin, cout), in};
    }
    case OpKind::kDWConv:
      return {ops::dwconv(k, s, cin), in};
    case OpKind::kPointwiseConv:
      return {ops::pointwise(cin, cout, s), in};
    case OpKind::kMBConv: {
      static const int kExpand[] = {1, 3, 4, 6};
      return {ops::mbconv(k, s, cin, cout, Rational(pick(rng, kExpand))), in};
    }
    case OpKind::kAvgPool:
      return {ops::avg_pool(pick(rng, kKernels), s, cin), in};
    case OpKind::kMaxPool:
      return {ops::max_pool(pick(rng, kKernels), s, cin), in};
    case OpKind::kReLU:
      return {ops::relu(cin), in};
    case OpKind::kLeakyReLU: {
      static const double kSlopes[] = {0.0, 0.1, 0.2};
      return {ops::leaky_relu(cin, pick(rng, kSlopes), rng.below(2) == 1), in};
    }
    case OpKind::kUpsampleNearest:
      return {ops::upsample_nearest(cin, 2), in};
    case OpKind::kUpsampleBilinear:
      return {ops::upsample_bilinear(cin, 2), in};
    case OpKind::kDepthToSpace: {
      const int c = 4 * pick(rng, kChannels);
      return {ops::depth_to_space(c, 2), {c, hw, hw}};
    }
    case OpKind::kLinear: {
      static const int kSpatial[] = {1, 2, 4, 6, 7};
      static const int kOut[] = {4, 10, 100, 1000};
      const int side = pick(rng, kSpatial);
      return {ops::linear(cin * side * side, pick(rng, kOut)), {cin, side, side}};
    }
    case OpKind::kIdentity:
      break;
  }
  return {ops::relu(cin), in};
}

std::vector<ProfileRecord> simulate_records(const SimulatedVPU& device, int count, std::uint64_t seed) {
  Rng rng(seed);
  const double cycles_per_ms = device.config().clock_ghz * 1e6;
  std::vector<ProfileRecord> out;
  for (int i = 0; i < count; ++i) {
    auto [op, in] = random_workload(rng);
    out.push_back({op, in, device.layer_cost_ms(op, in) * cycles_per_ms});
  }
  return out;
}

}  // namespace hwnas
