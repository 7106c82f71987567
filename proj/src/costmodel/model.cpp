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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hwnas/costmodel.hpp"
#include "hwnas/error.hpp"
#include "json.hpp"

namespace hwnas {

namespace {

constexpr double kMaxLog = 700.0;

CompactNet mlp(int h1, int h2) {
  CompactNet net;
  net.input_shape = {static_cast<int>(kNumFeatures), 1, 1};
  net.layers = {ops::linear(static_cast<int>(kNumFeatures), h1), ops::relu(h1), ops::linear(h1, h2), ops::relu(h2),
                ops::linear(h2, 1)};
  return net;
}

}  // namespace

CostModel::CostModel(const CostModelConfig& cfg, std::uint64_t seed)
    : hidden1_(cfg.hidden1),
      hidden2_(cfg.hidden2),
      feature_mean_(kNumFeatures, 0.0),
      feature_std_(kNumFeatures, 1.0) {
  if (cfg.hidden1 < 1 || cfg.hidden2 < 1) {
    throw Error(ErrorCode::kInvalidArgument, "cost model widths must be positive");
  }
  net_ = std::make_unique<Network>(mlp(hidden1_, hidden2_), seed);
  auto params = net_->parameters();
  for (auto& [name, p] : params) {
    if (name.rfind("layers[4].", 0) == 0) p->value.fill(0.0);
  }
}

CostModel::CostModel(CostModel&&) noexcept = default;
CostModel& CostModel::operator=(CostModel&&) noexcept = default;
CostModel::~CostModel() = default;

Tensor CostModel::standardize(std::span<const FeatureVector> features) const {
  Tensor x({features.size(), kNumFeatures, 1, 1});
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (std::size_t k = 0; k < kNumFeatures; ++k) {
      x[i * kNumFeatures + k] = (features[i][k] - feature_mean_[k]) / feature_std_[k];
    }
  }
  return x;
}

std::vector<double> CostModel::predict_batch(std::span<const FeatureVector> features) {
  if (features.empty()) return {};
  const Tensor out = net_->forward(standardize(features));
  net_->clear_state();
  std::vector<double> pred(features.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pred[i] = std::exp(std::min(target_mean_ + target_std_ * out[i], kMaxLog));
  }
  return pred;
}

double CostModel::predict(const OperatorSpec& op, const TensorShape& input) {
  const FeatureVector f = encode_features(op, input);
  return predict_batch(std::span(&f, 1)).front();
}

std::string CostModel::to_json() {
  nlohmann::ordered_json j;
  j["format"] = "hwnas.costmodel";
  j["version"] = 1;
  j["hidden"] = {hidden1_, hidden2_};
  j["feature_mean"] = feature_mean_;
  j["feature_std"] = feature_std_;
  j["target_mean"] = target_mean_;
  j["target_std"] = target_std_;
  const auto params = net_->parameters();
  j["parameters"] = nlohmann::ordered_json::parse(checkpoint_to_json(params));
  return j.dump(2) + "\n";
}

CostModel CostModel::from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    if (j.at("format") != "hwnas.costmodel") throw ParseError("$.format", "not a cost model file");
    if (j.at("version") != 1) throw ParseError("$.version", "unsupported cost model version");
    CostModelConfig cfg;
    cfg.hidden1 = j.at("hidden").at(0).get<int>();
    cfg.hidden2 = j.at("hidden").at(1).get<int>();
    CostModel model(cfg, 0);
    model.feature_mean_ = j.at("feature_mean").get<std::vector<double>>();
    model.feature_std_ = j.at("feature_std").get<std::vector<double>>();
    if (model.feature_mean_.size() != kNumFeatures || model.feature_std_.size() != kNumFeatures) {
      throw ParseError("$.feature_mean", "expected " + std::to_string(kNumFeatures) + " values");
    }
    model.target_mean_ = j.at("target_mean").get<double>();
    model.target_std_ = j.at("target_std").get<double>();
    const auto params = model.net_->parameters();
    checkpoint_from_json(j.at("parameters").dump(), params);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("$", std::string("cost model: ") + e.what());
  }
}

std::pair<CostModel, CostModelReport> train_cost_model(std::span<const ProfileRecord> records,
                                                       const CostModelConfig& cfg) {
  if (records.size() < 50) {
    throw Error(ErrorCode::kInsufficientData,
                "cost model needs at least 50 records, got " + std::to_string(records.size()));
  }
  if (cfg.epochs < 0 || cfg.batch_size < 1 || !(cfg.val_fraction >= 0.0 && cfg.val_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cost model: bad epochs, batch size or validation fraction");
  }
  std::vector<FeatureVector> features;
  std::vector<double> targets;
  for (const auto& r : records) {
    if (!std::isfinite(r.measured_cycles) || r.measured_cycles <= 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "cost model: measured cycles must be finite and positive");
    }
    features.push_back(encode_features(r.op, r.input));
    targets.push_back(std::log(r.measured_cycles));
  }

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span(order));
  const auto n_val = static_cast<std::size_t>(std::llround(cfg.val_fraction * static_cast<double>(order.size())));
  const std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());

  CostModel model(cfg, mix_seed(cfg.seed, 1));
  const double nt = static_cast<double>(train.size());
  for (std::size_t k = 0; k < kNumFeatures; ++k) {
    double mean = 0.0, var = 0.0;
    for (auto i : train) mean += features[i][k];
    mean /= nt;
    for (auto i : train) var += (features[i][k] - mean) * (features[i][k] - mean);
    const double sd = std::sqrt(var / nt);
    model.feature_mean_[k] = mean;
    model.feature_std_[k] = sd > 1e-12 ? sd : 1.0;
  }
  {
    double mean = 0.0, var = 0.0;
    for (auto i : train) mean += targets[i];
    mean /= nt;
    for (auto i : train) var += (targets[i] - mean) * (targets[i] - mean);
    const double sd = std::sqrt(var / nt);
    model.target_mean_ = mean;
    model.target_std_ = sd > 1e-12 ? sd : 1.0;
  }

  auto batch_of = [&](std::span<const std::size_t> idx) {
    std::vector<FeatureVector> f;
    Tensor y({idx.size(), 1, 1, 1});
    for (std::size_t i = 0; i < idx.size(); ++i) {
      f.push_back(features[idx[i]]);
      y[i] = (targets[idx[i]] - model.target_mean_) / model.target_std_;
    }
    return std::pair{model.standardize(f), y};
  };
  const auto [val_x, val_y] = batch_of(val);
  auto params = model.net_->parameter_ptrs();
  Adam adam(cfg.lr, cfg.weight_decay);
  CostModelReport report;
  report.train_records = train.size();
  report.val_records = val.size();
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span(train));
    adam.set_lr(0.5 * cfg.lr * (1.0 + std::cos(std::numbers::pi * epoch / cfg.epochs)));
    double total = 0.0;
    for (std::size_t start = 0; start < train.size(); start += bs) {
      const std::size_t count = std::min(bs, train.size() - start);
      const auto [x, y] = batch_of(std::span(train).subspan(start, count));
      const Tensor out = model.net_->forward(x);
      const LossResult loss = loss_mse(out, y);
      if (!std::isfinite(loss.value)) {
        model.net_->clear_state();
        throw Error(ErrorCode::kNonFiniteLoss, "cost model loss is not finite at epoch " + std::to_string(epoch));
      }
      model.net_->backward(loss.grad);
      adam.step(params);
      total += loss.value * static_cast<double>(count);
    }
    report.train_loss.push_back(total / nt);
    if (!val.empty()) {
      const Tensor out = model.net_->forward(val_x);
      model.net_->clear_state();
      report.val_loss.push_back(loss_mse(out, val_y).value);
    }
  }

  auto subset = [&](const std::vector<std::size_t>& idx) {
    std::vector<ProfileRecord> out;
    for (auto i : idx) out.push_back(records[i]);
    return out;
  };
  report.train_mape = evaluate_mape(model, subset(train));
  if (!val.empty()) report.val_mape = evaluate_mape(model, subset(val));
  return {std::move(model), std::move(report)};
}

double evaluate_mape(CostModel& model, std::span<const ProfileRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptySet, "evaluate_mape: no records");
  std::vector<FeatureVector> features;
  for (const auto& r : records) features.push_back(encode_features(r.op, r.input));
  const auto pred = model.predict_batch(features);
  double sum = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    sum += std::abs(pred[i] - records[i].measured_cycles) / records[i].measured_cycles;
  }
  return 100.0 * sum / static_cast<double>(records.size());
}

LatencyTable lut_from_model(CostModel& model, const SuperNet& net, double clock_ghz) {
  if (!(clock_ghz > 0.0)) throw Error(ErrorCode::kInvalidArgument, "clock_ghz must be positive");
  std::map<std::string, double> entries;
  for (const auto& q : enumerate_queries(net)) {
    entries[q.key] = q.op.kind == OpKind::kIdentity ? 0.0 : model.predict(q.op, q.input) / (clock_ghz * 1e6);
  }
  return LatencyTable(std::move(entries), {LutSource::kCostModel, "costmodel", utc_timestamp(), false});
}

}  // namespace hwnas
