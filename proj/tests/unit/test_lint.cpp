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

#include <gtest/gtest.h>

#include "hwnas/lint.hpp"
#include "hwnas/spaces.hpp"
#include "json.hpp"

namespace hwnas {
namespace {

CompactNet single(const OperatorSpec& op, const TensorShape& input) {
  return CompactNet{.task = Task::kSuperResolution, .input_shape = input, .layers = {op}, .sr_scale = 2};
}

TEST(Lint, ConvWith32ChannelsIsClean) {
  EXPECT_TRUE(lint_network(single(ops::conv(3, 1, 16, 32), {16, 8, 8})).empty());
}

TEST(Lint, ConvWith24ChannelsWarns) {
  const auto f = lint_network(single(ops::conv(3, 1, 16, 24), {16, 8, 8}));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].rule_id, "VPU002");
  EXPECT_EQ(f[0].severity, Severity::kWarning);
  EXPECT_EQ(f[0].layer_index, 0);
}

TEST(Lint, EveryConvFamilyKindIsChecked) {
  EXPECT_EQ(count_rule(lint_network(single(ops::dwconv(3, 1, 8), {8, 8, 8})), "VPU002"), 1u);
  EXPECT_EQ(count_rule(lint_network(single(ops::pointwise(16, 40), {16, 8, 8})), "VPU002"), 1u);
  EXPECT_EQ(count_rule(lint_network(single(ops::mbconv(3, 1, 16, 20, Rational(6)), {16, 8, 8})), "VPU002"), 1u);
  EXPECT_EQ(count_rule(lint_network(single(ops::max_pool(3, 1, 8), {8, 8, 8})), "VPU002"), 0u);
}

TEST(Lint, DepthToSpaceWarns) {
  const auto f = lint_network(single(ops::depth_to_space(32, 2), {32, 8, 8}));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].rule_id, "VPU001");
}

TEST(Lint, PerChannelLeakyReluWarns) {
  const auto f = lint_network(single(ops::leaky_relu(16, 0.25, true), {16, 8, 8}));
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].rule_id, "VPU001");
}

TEST(Lint, SharedSlopeLeakyReluOnlyInStrictMode) {
  const CompactNet net = single(ops::leaky_relu(16, 0.1), {16, 8, 8});
  EXPECT_TRUE(lint_network(net).empty());
  EXPECT_EQ(count_rule(lint_network(net, {.strict_leaky_relu = true}), "VPU001"), 1u);
}

TEST(Lint, BilinearWarnsNearestDoesNot) {
  EXPECT_EQ(count_rule(lint_network(single(ops::upsample_bilinear(16, 2), {16, 8, 8})), "VPU001"), 1u);
  EXPECT_TRUE(lint_network(single(ops::upsample_nearest(16, 2), {16, 8, 8})).empty());
}

TEST(Lint, LargeDepthwisePointwisePairIsAdvisory) {
  // 64 x 96 x 96 x 2 bytes = 1179648 > 1 MiB.
  const CompactNet big{.input_shape = {64, 96, 96}, .layers = {ops::dwconv(3, 1, 64), ops::pointwise(64, 64)}};
  const auto f = lint_network(big);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].rule_id, "VPU003");
  EXPECT_EQ(f[0].severity, Severity::kAdvisory);
  EXPECT_FALSE(has_warnings(f));

  const CompactNet small{.input_shape = {64, 32, 32}, .layers = {ops::dwconv(3, 1, 64), ops::pointwise(64, 64)}};
  EXPECT_TRUE(lint_network(small).empty());
  const CompactNet unpaired{.input_shape = {64, 96, 96}, .layers = {ops::dwconv(3, 1, 64), ops::relu(64)}};
  EXPECT_TRUE(lint_network(unpaired).empty());
}

TEST(Lint, MBConvHiddenActivationIsAdvisory) {
  // Hidden 16 * 6 = 96 channels at 64 x 64: 786432 bytes.
  EXPECT_TRUE(lint_network(single(ops::mbconv(3, 1, 16, 16, Rational(6)), {16, 64, 64})).empty());
  // At 96 x 96: 1769472 bytes.
  EXPECT_EQ(count_rule(lint_network(single(ops::mbconv(3, 1, 16, 16, Rational(6)), {16, 96, 96})), "VPU003"), 1u);
}

TEST(Lint, FindingsOrderedByLayerThenRule) {
  const CompactNet net{.input_shape = {8, 8, 8},
                       .layers = {ops::pointwise(8, 24), ops::depth_to_space(24, 2), ops::conv(3, 1, 6, 12),
                                  ops::leaky_relu(12, 0.1, true)}};
  const auto f = lint_network(net);
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[0].layer_index, 0);
  EXPECT_EQ(f[0].rule_id, "VPU002");
  EXPECT_EQ(f[1].layer_index, 1);
  EXPECT_EQ(f[1].rule_id, "VPU001");
  EXPECT_EQ(f[2].layer_index, 2);
  EXPECT_EQ(f[3].layer_index, 3);
  EXPECT_EQ(lint_network(net), f);
}

TEST(Lint, SupernetReportsPerCandidate) {
  const SuperNet net = spaces::toy_sr(16, 32);
  const auto f = lint_network(net);
  // LeakyReLU (stage 0), bilinear and the pixel-shuffle chain (stage 2).
  std::vector<std::pair<int, int>> dsp;
  for (const auto& x : f) {
    if (x.rule_id == "VPU001") dsp.emplace_back(x.stage_index, x.candidate_index);
  }
  EXPECT_EQ(dsp, (std::vector<std::pair<int, int>>{{0, 1}, {2, 1}, {2, 2}}));
  for (const auto& x : f) {
    if (x.stage_index >= 0) EXPECT_EQ(x.layer_index, static_cast<int>(net.stem.size()) + x.stage_index);
  }
}

TEST(Lint, RuleRegistry) {
  const auto rules = lint_rules();
  ASSERT_EQ(rules.size(), 4u);
  EXPECT_EQ(rules[0].id, "VPU001");
  EXPECT_EQ(rules[2].severity, Severity::kAdvisory);
  EXPECT_EQ(rules[3].id, "VPU004");
  EXPECT_TRUE(rules[3].reserved);
}

TEST(Lint, JsonAndTableExport) {
  const auto f = lint_network(single(ops::conv(3, 1, 16, 24), {16, 8, 8}));
  const auto j = nlohmann::json::parse(findings_to_json(f));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["rule_id"], "VPU002");
  EXPECT_EQ(j[0]["severity"], "Warning");
  EXPECT_EQ(j[0]["layer_index"], 0);
  EXPECT_NE(findings_to_table(f).find("VPU002"), std::string::npos);
  EXPECT_EQ(findings_to_table({}), "no findings\n");
}

}  // namespace
}  // namespace hwnas
