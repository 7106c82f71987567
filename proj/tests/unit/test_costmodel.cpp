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
#include <set>

#include "hwnas/costmodel.hpp"
#include "hwnas/error.hpp"
#include "hwnas/spaces.hpp"

namespace hwnas {
namespace {

CostModelConfig quick_config() {
  CostModelConfig cfg;
  cfg.epochs = 200;
  return cfg;
}

TEST(Features, ConvEncoding) {
  const FeatureVector f = encode_features(ops::conv(3, 1, 16, 32), {16, 32, 32});
  for (int k = 0; k < kNumOpKinds; ++k) EXPECT_EQ(f[k], k == static_cast<int>(OpKind::kConv) ? 1.0 : 0.0);
  const double expect[] = {std::log2(17.0), std::log2(33.0), std::log2(33.0), std::log2(33.0),
                           std::log2(4.0),  std::log2(2.0),  std::log2(2.0),  std::log2(2.0)};
  for (int k = 0; k < 8; ++k) EXPECT_DOUBLE_EQ(f[kNumOpKinds + k], expect[k]) << k;
  EXPECT_EQ(f[kNumFeatures - 1], 0.0);
  EXPECT_EQ(kNumFeatures, 22u);
}

TEST(Features, IdentitySetsOnlyItsKindSlot) {
  const FeatureVector f = encode_features(ops::identity(8), {8, 4, 4});
  for (int k = 0; k < kNumOpKinds; ++k) EXPECT_EQ(f[k], k == static_cast<int>(OpKind::kIdentity) ? 1.0 : 0.0);
  EXPECT_EQ(f[kNumOpKinds], f[kNumOpKinds + 1]);
}

TEST(Features, StrideChangesExactlyOneCoordinate) {
  const FeatureVector a = encode_features(ops::conv(3, 1, 16, 16), {16, 8, 8});
  const FeatureVector b = encode_features(ops::conv(3, 2, 16, 16), {16, 8, 8});
  int differing = 0;
  for (std::size_t k = 0; k < kNumFeatures; ++k) differing += a[k] != b[k];
  EXPECT_EQ(differing, 1);
}

TEST(Features, SlopeFlag) {
  EXPECT_EQ(encode_features(ops::leaky_relu(8, 0.0), {8, 4, 4})[kNumFeatures - 1], 0.0);
  EXPECT_EQ(encode_features(ops::leaky_relu(8, 0.1), {8, 4, 4})[kNumFeatures - 1], 1.0);
  EXPECT_EQ(encode_features(ops::leaky_relu(8, 0.0, true), {8, 4, 4})[kNumFeatures - 1], 1.0);
}

TEST(Features, InvalidOpThrows) {
  try {
    (void)encode_features(ops::conv(3, 1, 16, 16), {8, 4, 4});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidOp);
  }
}

TEST(Records, RandomWorkloadsAreValidAndNeverIdentity) {
  Rng rng(1);
  std::set<OpKind> kinds;
  for (int i = 0; i < 5000; ++i) {
    const auto [op, shape] = random_workload(rng);
    EXPECT_NE(op.kind, OpKind::kIdentity);
    EXPECT_TRUE(try_output_shape(op, shape).has_value()) << canonical_key(op, shape);
    kinds.insert(op.kind);
  }
  EXPECT_EQ(kinds.size(), static_cast<std::size_t>(kNumOpKinds - 1));
}

TEST(Records, SimulatedCyclesMatchClosedForm) {
  const SimulatedVPU device;
  for (const auto& r : simulate_records(device, 50, 3)) {
    EXPECT_NEAR(r.measured_cycles, device.layer_cost_ms(r.op, r.input) * 0.7e6, 1e-6 * r.measured_cycles);
    EXPECT_GT(r.measured_cycles, 0.0);
  }
}

TEST(Records, JsonlRoundTrip) {
  const auto records = simulate_records(SimulatedVPU{}, 40, 8);
  EXPECT_EQ(records_from_jsonl(to_jsonl(records)), records);
  EXPECT_THROW(records_from_jsonl("{\"op\": 3}\n"), ParseError);
}

TEST(Train, TooFewRecordsIsInsufficientData) {
  const auto records = simulate_records(SimulatedVPU{}, 49, 1);
  try {
    (void)train_cost_model(records, quick_config());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientData);
  }
}

TEST(Train, ConstantTargetIsLearnedExactly) {
  auto records = simulate_records(SimulatedVPU{}, 80, 2);
  for (auto& r : records) r.measured_cycles = 1234.0;
  auto [model, report] = train_cost_model(records, quick_config());
  EXPECT_LT(evaluate_mape(model, records), 1e-6);
}

TEST(Train, SameSeedSameModel) {
  const auto records = simulate_records(SimulatedVPU{}, 80, 2);
  auto a = train_cost_model(records, quick_config());
  auto b = train_cost_model(records, quick_config());
  EXPECT_EQ(a.first.to_json(), b.first.to_json());
  EXPECT_EQ(a.second.train_loss, b.second.train_loss);
}

TEST(Train, ReportCurvesCoverEveryEpoch) {
  const auto records = simulate_records(SimulatedVPU{}, 100, 2);
  const auto [model, report] = train_cost_model(records, quick_config());
  EXPECT_EQ(report.train_loss.size(), 200u);
  EXPECT_EQ(report.val_loss.size(), 200u);
  EXPECT_EQ(report.train_records + report.val_records, 100u);
  EXPECT_LT(report.train_loss.back(), report.train_loss.front());
}

TEST(Train, ScalingTargetsScalesPredictions) {
  const auto records = simulate_records(SimulatedVPU{}, 120, 4);
  auto doubled = records;
  for (auto& r : doubled) r.measured_cycles *= 2.0;
  auto a = train_cost_model(records, quick_config());
  auto b = train_cost_model(doubled, quick_config());
  EXPECT_LT(std::abs(evaluate_mape(b.first, doubled) - evaluate_mape(a.first, records)), 5.0);
  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const auto [op, shape] = random_workload(rng);
    EXPECT_NEAR(b.first.predict(op, shape) / a.first.predict(op, shape), 2.0, 1e-6);
  }
}

class TrainedModel : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    records_ = new std::vector<ProfileRecord>(simulate_records(SimulatedVPU{}, 200, 3));
    model_ = new CostModel(train_cost_model(*records_, quick_config()).first);
  }
  static void TearDownTestSuite() {
    delete model_;
    delete records_;
  }
  static std::vector<ProfileRecord>* records_;
  static CostModel* model_;
};

std::vector<ProfileRecord>* TrainedModel::records_ = nullptr;
CostModel* TrainedModel::model_ = nullptr;

TEST_F(TrainedModel, PredictionsArePositiveAndPure) {
  Rng rng(12);
  for (int i = 0; i < 2000; ++i) {
    const auto [op, shape] = random_workload(rng);
    const double p = model_->predict(op, shape);
    EXPECT_GT(p, 0.0);
    EXPECT_EQ(p, model_->predict(op, shape));
  }
  EXPECT_GT(model_->predict(ops::identity(8), {8, 4, 4}), 0.0);
}

TEST_F(TrainedModel, JsonRoundTripKeepsPredictions) {
  CostModel copy = CostModel::from_json(model_->to_json());
  Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const auto [op, shape] = random_workload(rng);
    EXPECT_EQ(copy.predict(op, shape), model_->predict(op, shape));
  }
}

TEST_F(TrainedModel, MapeArithmetic) {
  std::vector<ProfileRecord> exact(records_->begin(), records_->begin() + 10);
  for (auto& r : exact) r.measured_cycles = model_->predict(r.op, r.input);
  EXPECT_NEAR(evaluate_mape(*model_, exact), 0.0, 1e-9);

  ProfileRecord one = exact[0];
  one.measured_cycles = model_->predict(one.op, one.input) / 1.1;
  EXPECT_NEAR(evaluate_mape(*model_, std::vector<ProfileRecord>{one}), 10.0, 1e-9);

  try {
    (void)evaluate_mape(*model_, std::vector<ProfileRecord>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptySet);
  }
}

TEST_F(TrainedModel, LutFromModelCoversBuildLutKeys) {
  for (auto name : spaces::names()) {
    const SuperNet net = spaces::by_name(name);
    SimulatedVPU device;
    const LatencyTable measured = build_lut(device, net);
    const LatencyTable predicted = lut_from_model(*model_, net, 0.7);
    EXPECT_EQ(predicted.metadata().source, LutSource::kCostModel);
    ASSERT_EQ(predicted.size(), measured.size()) << name;
    for (const auto& q : enumerate_queries(net)) {
      ASSERT_TRUE(predicted.contains(q.key)) << q.key;
      if (q.op.kind == OpKind::kIdentity) {
        EXPECT_EQ(predicted.at(q.key), 0.0);
      } else {
        EXPECT_GT(predicted.at(q.key), 0.0) << q.key;
        EXPECT_DOUBLE_EQ(predicted.at(q.key), model_->predict(q.op, q.input) / 0.7e6);
      }
    }
  }
}

}  // namespace
}  // namespace hwnas
