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

#include <cmath>
#include <map>

#include "hwnas/data.hpp"
#include "hwnas/error.hpp"

namespace hwnas {
namespace {

std::vector<int> all_labels(const Dataset& d) {
  std::vector<int> labels = d.train.labels;
  labels.insert(labels.end(), d.val.labels.begin(), d.val.labels.end());
  labels.insert(labels.end(), d.test.labels.begin(), d.test.labels.end());
  return labels;
}

TEST(ClassificationData, SameSeedIsBitwiseIdentical) {
  const DatasetSpec spec{.num_samples = 100, .image = {3, 8, 8}, .seed = 42};
  const Dataset a = generate_classification_dataset(spec);
  const Dataset b = generate_classification_dataset(spec);
  EXPECT_EQ(a.train.inputs, b.train.inputs);
  EXPECT_EQ(a.test.inputs, b.test.inputs);
  EXPECT_EQ(all_labels(a), all_labels(b));

  DatasetSpec other = spec;
  other.seed = 43;
  EXPECT_NE(generate_classification_dataset(other).train.inputs, a.train.inputs);
}

TEST(ClassificationData, LabelsBalancedWithinOne) {
  const Dataset d = generate_classification_dataset({.num_samples = 605, .image = {3, 8, 8}, .num_classes = 10});
  std::map<int, int> counts;
  for (int l : all_labels(d)) ++counts[l];
  ASSERT_EQ(counts.size(), 10u);
  int lo = 1 << 30, hi = 0;
  for (auto [label, n] : counts) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  EXPECT_LE(hi - lo, 1);
}

TEST(ClassificationData, SplitIsSeventyFifteenFifteen) {
  const Dataset d = generate_classification_dataset({.num_samples = 600, .image = {3, 8, 8}});
  EXPECT_EQ(d.train.size(), 420u);
  EXPECT_EQ(d.val.size(), 90u);
  EXPECT_EQ(d.test.size(), 90u);
  EXPECT_EQ(d.train.labels.size(), 420u);
  EXPECT_EQ(d.input_shape, (TensorShape{3, 8, 8}));
}

TEST(ClassificationData, SeparableVariantIsLearnedByLinearProbe) {
  const DatasetSpec spec{.num_samples = 200, .image = {3, 8, 8}, .seed = 5, .separable = true};
  const Dataset d = generate_classification_dataset(spec);
  EXPECT_EQ(d.num_classes, 2);
  const CompactNet probe{.input_shape = {3, 8, 8}, .layers = {ops::linear(192, 2)}, .num_classes = 2};
  Network net(probe, 1);
  train_compact(net, d, {.epochs = 60, .lr = 0.05, .weight_decay = 0.0, .batch_size = 16, .seed = 3});
  EXPECT_EQ(evaluate(net, d.train, Task::kClassification).accuracy, 1.0);
}

TEST(SrData, LowResIsBoxMeanOfHighRes) {
  const Dataset d = generate_sr_dataset({.task = Task::kSuperResolution, .num_samples = 20, .image = {3, 8, 8}});
  EXPECT_EQ(d.target_shape, (TensorShape{3, 16, 16}));
  const Split& s = d.train;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t y = 0; y < 8; ++y) {
        for (std::size_t x = 0; x < 8; ++x) {
          double acc = 0.0;
          for (std::size_t dy = 0; dy < 2; ++dy) {
            for (std::size_t dx = 0; dx < 2; ++dx) {
              acc += s.targets[((i * 3 + c) * 16 + 2 * y + dy) * 16 + 2 * x + dx];
            }
          }
          ASSERT_EQ(s.inputs[((i * 3 + c) * 8 + y) * 8 + x], acc * 0.25);
        }
      }
    }
  }
}

TEST(SrData, SameSeedIsBitwiseIdentical) {
  const DatasetSpec spec{.task = Task::kSuperResolution, .num_samples = 12, .image = {3, 8, 8}, .seed = 9};
  EXPECT_EQ(generate_sr_dataset(spec).train.targets, generate_sr_dataset(spec).train.targets);
}

TEST(SrData, ConstantImageIsRecoveredExactly) {
  const Tensor lr = Tensor::feature_map(1, {3, 4, 4}, 0.375);
  const Tensor hr = Tensor::feature_map(1, {3, 8, 8}, 0.375);
  const CompactNet up{.task = Task::kSuperResolution,
                      .input_shape = {3, 4, 4},
                      .layers = {ops::upsample_nearest(3, 2)},
                      .sr_scale = 2};
  Network net(up, 1);
  const PsnrResult r = psnr(net.forward(lr), hr);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.db, kPsnrCapDb);
}

TEST(Psnr, Examples) {
  const Tensor target({1, 1, 2, 2}, 0.5);
  EXPECT_TRUE(psnr(target, target).exact);
  EXPECT_EQ(psnr(target, target).db, 99.0);

  const Tensor off10({1, 1, 2, 2}, 0.6);  // MSE 0.01
  EXPECT_NEAR(psnr(off10, target).db, 20.0, 1e-9);
  EXPECT_FALSE(psnr(off10, target).exact);
  const Tensor off100({1, 1, 2, 2}, 0.51);  // MSE 1e-4
  EXPECT_NEAR(psnr(off100, target).db, 40.0, 1e-9);
  EXPECT_NEAR(psnr(off100, target, 2.0).db, 40.0 + 20.0 * std::log10(2.0), 1e-9);
}

TEST(Psnr, ShapeMismatch) {
  try {
    (void)psnr(Tensor({1, 1, 2, 2}), Tensor({1, 1, 2, 3}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(BatchSampler, DropsIncompleteTailBatch) {
  BatchSampler sampler(10, 4, 1);
  for (int b = 0; b < 7; ++b) EXPECT_EQ(sampler.next().size(), 4u);
}

TEST(BatchSampler, CoversEveryIndexPerEpoch) {
  BatchSampler sampler(12, 4, 1);
  std::map<std::size_t, int> seen;
  for (int b = 0; b < 6; ++b) {
    for (std::size_t i : sampler.next()) ++seen[i];
  }
  ASSERT_EQ(seen.size(), 12u);
  for (auto [i, n] : seen) EXPECT_EQ(n, 2) << i;
}

}  // namespace
}  // namespace hwnas
