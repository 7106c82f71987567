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

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "hwnas/data.hpp"
#include "hwnas/error.hpp"
#include "hwnas/profiler.hpp"
#include "hwnas/search.hpp"
#include "hwnas/spaces.hpp"

namespace hwnas {
namespace {

TEST(PathProbs, ZerosAreUniform) {
  const auto p = path_probs(std::vector<double>{0.0, 0.0});
  EXPECT_EQ(p[0], 0.5);
  EXPECT_EQ(p[1], 0.5);
}

TEST(PathProbs, EqualEntriesAreUniformForAnyOffset) {
  for (double c : {-800.0, 0.0, 3.5, 900.0}) {
    const auto p = path_probs(std::vector<double>{c, c, c});
    for (double v : p) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
  }
}

TEST(PathProbs, LogTwo) {
  const auto p = path_probs(std::vector<double>{std::log(2.0), 0.0});
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
}

TEST(PathProbs, SumsToOne) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> a(1 + rng.below(8));
    for (auto& v : a) v = rng.uniform(-50.0, 50.0);
    const auto p = path_probs(a);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  }
}

TEST(SampleGate, DegenerateDistributionAlwaysPicksIt) {
  Rng rng(3);
  const std::vector<double> p{1.0, 0.0};
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_gate(p, rng), 0);
}

TEST(SampleGate, FairCoinFrequency) {
  Rng rng(42);
  const std::vector<double> p{0.5, 0.5};
  int zeros = 0;
  for (int i = 0; i < 100000; ++i) zeros += sample_gate(p, rng) == 0;
  EXPECT_GE(zeros / 1e5, 0.494);
  EXPECT_LE(zeros / 1e5, 0.506);
}

TEST(SampleGate, SameSeedSameSequence) {
  Rng a(9), b(9);
  const std::vector<double> p{0.2, 0.3, 0.5};
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_gate(p, a), sample_gate(p, b));
}

TEST(SampleGate, ChiSquareGoodnessOfFit) {
  Rng rng(42);
  const std::vector<double> p = path_probs(std::vector<double>{0.3, -1.2, 0.8, 0.0, -0.4});
  const int n = 100000;
  std::vector<int> counts(p.size(), 0);
  for (int i = 0; i < n; ++i) ++counts[sample_gate(p, rng)];
  double stat = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double expected = n * p[j];
    stat += (counts[j] - expected) * (counts[j] - expected) / expected;
  }
  const boost::math::chi_squared dist(static_cast<double>(p.size() - 1));
  const double p_value = boost::math::cdf(boost::math::complement(dist, stat));
  EXPECT_GT(p_value, 0.01) << "chi2 " << stat;
}

TEST(ArchGrad, HandExpansion) {
  const auto g = arch_grad(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5});
  EXPECT_DOUBLE_EQ(g[0], 0.25);
  EXPECT_DOUBLE_EQ(g[1], -0.25);
}

TEST(ArchGrad, ConstantGateGradientGivesZero) {
  for (double v : arch_grad(std::vector<double>{2.0, 2.0, 2.0}, std::vector<double>{0.1, 0.6, 0.3})) {
    EXPECT_NEAR(v, 0.0, 1e-16);
  }
}

TEST(ArchGrad, SaturatedSoftmaxGivesZero) {
  for (double v : arch_grad(std::vector<double>{3.0, -7.0}, std::vector<double>{1.0, 0.0})) EXPECT_EQ(v, 0.0);
}

TEST(ArchGrad, MatchesDerivativeOfLinearizedLoss) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng.below(4);
    std::vector<double> alpha(m), c(m);
    for (std::size_t j = 0; j < m; ++j) {
      alpha[j] = rng.uniform(-2.0, 2.0);
      c[j] = rng.uniform(-1.0, 1.0);
    }
    const auto g = arch_grad(c, path_probs(alpha));
    const auto linearized = [&](const std::vector<double>& a) {
      const auto p = path_probs(a);
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += p[j] * c[j];
      return s;
    };
    for (std::size_t k = 0; k < m; ++k) {
      auto hi = alpha, lo = alpha;
      hi[k] += 1e-6;
      lo[k] -= 1e-6;
      EXPECT_NEAR(g[k], (linearized(hi) - linearized(lo)) / 2e-6, 1e-8);
    }
  }
}

TEST(ArchGrad, LengthMismatch) {
  try {
    (void)arch_grad(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(TotalLoss, Arithmetic) {
  SearchConfig cfg;
  cfg.lambda1 = 0.0;
  cfg.lambda2 = 0.0;
  EXPECT_EQ(total_loss(1.25, 2.0, 3.0, cfg), 1.25);
  cfg.lambda1 = 0.1;
  cfg.lambda2 = 0.5;
  EXPECT_DOUBLE_EQ(total_loss(1.0, 2.0, 3.0, cfg), 2.7);
  SearchConfig more = cfg;
  more.lambda2 = 0.6;
  EXPECT_GT(total_loss(1.0, 2.0, 3.0, more), total_loss(1.0, 2.0, 3.0, cfg));
}

TEST(SearchConfigJson, RoundTripAndUnknownField) {
  SearchConfig cfg;
  cfg.lambda2 = 0.125;
  cfg.rounds = 7;
  cfg.seed = 1234567890123ULL;
  cfg.latency_source = "toy.lut.json";
  EXPECT_EQ(search_config_from_json(to_json(cfg)), cfg);
  EXPECT_EQ(search_config_from_json("{}"), SearchConfig{});
  EXPECT_THROW(search_config_from_json(R"({"lambda3": 1})"), ParseError);
}

TEST(Derive, ArgmaxPerStage) {
  const SuperNet net = spaces::toy_classification();
  ArchParams arch{{{0.2, 1.3, -0.5}, {0.0, 0.0, 1.0}, {3.0, 2.0, 1.0}}};
  const CompactNet c = derive_compact(net, arch);
  EXPECT_EQ(c.derivation->choices, (std::vector<int>{1, 2, 0}));
  EXPECT_EQ(c.derivation->ties, (std::vector<bool>{false, false, false}));
}

TEST(Derive, TieGoesToLowestIndexAndIsFlagged) {
  const SuperNet net = spaces::toy_classification();
  ArchParams arch{{{1.0, 1.0, 0.0}, {0.0, 2.0, 2.0}, {0.0, 0.0, 0.0}}};
  const CompactNet c = derive_compact(net, arch);
  EXPECT_EQ(c.derivation->choices, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(c.derivation->ties, (std::vector<bool>{true, true, true}));
}

TEST(Derive, InvariantUnderStageShift) {
  const SuperNet net = spaces::toy_classification();
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    ArchParams arch = ArchParams::zeros(net);
    for (auto& a : arch.alpha) {
      for (auto& v : a) v = rng.uniform(-1.0, 1.0);
    }
    ArchParams shifted = arch;
    for (auto& a : shifted.alpha) {
      for (auto& v : a) v += 5.0;
    }
    EXPECT_EQ(derive_compact(net, arch).derivation->choices, derive_compact(net, shifted).derivation->choices);
  }
}

TEST(Derive, LengthMismatch) {
  EXPECT_THROW(derive_compact(spaces::toy_classification(), ArchParams{{{0.0, 1.0, 2.0}}}), Error);
}

/// Small classification space with its noiseless simulator LUT and data.
struct ToyFixture {
  SuperNet net = spaces::toy_classification(4, 8, 3);
  LatencyTable lut;
  Dataset data;

  ToyFixture() {
    SimulatedVPU device;
    lut = build_lut(device, net);
    data = generate_classification_dataset(
        {.task = Task::kClassification, .num_samples = 120, .image = {3, 8, 8}, .num_classes = 3, .seed = 5});
  }
};

SearchConfig small_config() {
  SearchConfig cfg;
  cfg.rounds = 3;
  cfg.weight_steps_per_round = 3;
  cfg.arch_steps_per_round = 2;
  cfg.batch_size = 8;
  cfg.seed = 11;
  return cfg;
}

std::map<std::string, Tensor> snapshot(SupernetModel& model) {
  std::map<std::string, Tensor> out;
  for (auto& [name, p] : model.parameters()) out[name] = p->value;
  return out;
}

TEST(TrainSearch, ZeroRoundsReturnsInitialState) {
  ToyFixture fx;
  SupernetModel model(fx.net, 1);
  SearchConfig cfg = small_config();
  cfg.rounds = 0;
  const SearchResult r = train_search(model, fx.data, fx.lut, cfg);
  EXPECT_TRUE(r.history.rounds.empty());
  EXPECT_EQ(r.arch, ArchParams::zeros(fx.net));
}

TEST(TrainSearch, SameSeedGivesIdenticalHistory) {
  ToyFixture fx;
  SupernetModel a(fx.net, 1), b(fx.net, 1);
  const SearchResult ra = train_search(a, fx.data, fx.lut, small_config());
  const SearchResult rb = train_search(b, fx.data, fx.lut, small_config());
  EXPECT_EQ(ra.history, rb.history);
  EXPECT_EQ(ra.arch, rb.arch);
  EXPECT_EQ(ra.history.to_csv(), rb.history.to_csv());
  ASSERT_EQ(ra.history.rounds.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(ra.history.rounds[i].round, i);
}

TEST(TrainSearch, HistoryCsvLayout) {
  ToyFixture fx;
  SupernetModel model(fx.net, 1);
  const SearchResult r = train_search(model, fx.data, fx.lut, small_config());
  const std::string csv = r.history.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "round,train_loss,val_loss,e_latency_ms,stage0_cand0,stage0_cand1,stage0_cand2,stage1_cand0,"
            "stage1_cand1,stage1_cand2,stage2_cand0,stage2_cand1,stage2_cand2");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(TrainSearch, WeightStepOnlyTouchesSampledPath) {
  ToyFixture fx;
  SupernetModel model(fx.net, 1);
  SearchTrainer trainer(model, fx.data, fx.lut, small_config());
  for (int step = 0; step < 5; ++step) {
    const auto before = snapshot(model);
    trainer.weight_step();
    const auto after = snapshot(model);
    for (std::size_t s = 0; s < fx.net.stages.size(); ++s) {
      std::set<std::size_t> changed;
      for (const auto& [name, value] : before) {
        const std::string prefix = "stages[" + std::to_string(s) + "].candidates[";
        if (name.rfind(prefix, 0) != 0) continue;
        if (!(after.at(name) == value)) changed.insert(std::stoul(name.substr(prefix.size())));
      }
      EXPECT_LE(changed.size(), 1u) << "stage " << s;
    }
  }
}

TEST(TrainSearch, ArchStepLeavesWeightsBitwiseUnchanged) {
  ToyFixture fx;
  SupernetModel model(fx.net, 1);
  SearchTrainer trainer(model, fx.data, fx.lut, small_config());
  trainer.weight_step();
  const auto before = snapshot(model);
  const ArchParams arch_before = trainer.arch();
  for (int step = 0; step < 5; ++step) trainer.arch_step();
  EXPECT_EQ(snapshot(model), before);
  EXPECT_NE(trainer.arch(), arch_before);
}

TEST(TrainSearch, LatencyOnlyPushesTowardFasterCandidates) {
  ToyFixture fx;
  SupernetModel model(fx.net, 1);
  SearchConfig cfg = small_config();
  cfg.lambda2 = 1e4;
  SearchTrainer trainer(model, fx.data, fx.lut, cfg);
  const double before = trainer.expected_latency();
  for (int step = 0; step < 5; ++step) trainer.arch_step();
  EXPECT_LT(trainer.expected_latency(), before);
}

TEST(TrainSearch, MissingLutEntryNamesKey) {
  ToyFixture fx;
  std::map<std::string, double> entries = fx.lut.entries();
  const std::string key = canonical_key(fx.net.stages[1].candidates[1][0], fx.net.stages[1].input_shape);
  entries.erase(key);
  const LatencyTable partial(entries, fx.lut.metadata());
  SupernetModel model(fx.net, 1);
  try {
    SearchTrainer trainer(model, fx.data, partial, small_config());
    FAIL();
  } catch (const MissingEntryError& e) {
    EXPECT_EQ(e.key(), key);
  }
}

TEST(TrainSearch, DivergenceIsNonFiniteLossWithSnapshot) {
  ToyFixture fx;
  SupernetModel model(fx.net, 1);
  SearchConfig cfg = small_config();
  cfg.lr_weights = 1e6;
  cfg.rounds = 20;
  try {
    (void)train_search(model, fx.data, fx.lut, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFiniteLoss);
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos) << e.what();
  }
}

TEST(TrainSearch, PicksNonlinearPathWhenTaskNeedsIt) {
  // Gratings with random phase have zero mean per class, so a linear read-out
  // of the raw image cannot separate them; the MBConv path can.
  SuperNet net;
  net.input_shape = {3, 8, 8};
  net.stages.push_back(make_stage({{ops::identity(3)}, {ops::mbconv(3, 1, 3, 3, Rational(3))}}, {3, 8, 8}));
  net.head = {ops::avg_pool(3, 2, 3), ops::linear(3 * 4 * 4, 3)};
  net.num_classes = 3;
  SimulatedVPU device;
  const LatencyTable lut = build_lut(device, net);
  const Dataset data = generate_classification_dataset(
      {.task = Task::kClassification, .num_samples = 300, .image = {3, 8, 8}, .num_classes = 3, .seed = 42});

  // Brute-force check of the premise: the MBConv net is the better one.
  std::vector<double> accuracy;
  for (int choice : {0, 1}) {
    Network compact(compose(net, {choice}), 42);
    train_compact(compact, data, {.epochs = 10, .lr = 0.01, .seed = 42});
    accuracy.push_back(evaluate(compact, data.val, Task::kClassification).accuracy);
  }
  ASSERT_GT(accuracy[1], accuracy[0] + 0.1);

  SupernetModel model(net, 42);
  SearchConfig cfg;
  cfg.seed = 42;
  cfg.rounds = 30;
  const SearchResult r = train_search(model, data, lut, cfg);
  EXPECT_GT(path_probs(r.arch.alpha[0])[1], 0.9);
}

}  // namespace
}  // namespace hwnas
