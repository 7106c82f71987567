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

#include "common/format.hpp"
#include "hwnas/error.hpp"
#include "hwnas/search.hpp"

namespace hwnas {

namespace {

std::size_t checked_size(const Split& split, const char* name) {
  if (split.size() == 0) throw Error(ErrorCode::kEmptySet, std::string("search: empty ") + name + " split");
  return split.size();
}

std::string alpha_snapshot(const ArchParams& arch) {
  std::string out = "[";
  for (std::size_t s = 0; s < arch.alpha.size(); ++s) {
    out += s ? ",[" : "[";
    for (std::size_t j = 0; j < arch.alpha[s].size(); ++j) {
      out += (j ? "," : "") + format_double(arch.alpha[s][j]);
    }
    out += "]";
  }
  return out + "]";
}

}  // namespace

SearchTrainer::SearchTrainer(SupernetModel& model, const Dataset& data, const LatencyTable& lut,
                             const SearchConfig& cfg)
    : model_(model),
      data_(data),
      cfg_(cfg),
      arch_(ArchParams::zeros(model.net())),
      gate_rng_(mix_seed(cfg.seed, 13)),
      train_sampler_(checked_size(data.train, "train"), static_cast<std::size_t>(std::max(cfg.batch_size, 1)),
                     mix_seed(cfg.seed, 11)),
      val_sampler_(checked_size(data.val, "validation"), static_cast<std::size_t>(std::max(cfg.batch_size, 1)),
                   mix_seed(cfg.seed, 12)) {
  if (data.task != model.net().task) {
    throw Error(ErrorCode::kInvalidArgument, "search: dataset task differs from supernet task");
  }
  for (const auto& stage : model.net().stages) stage_latency_.push_back(candidate_latencies(lut, stage));
  fixed_latency_ = fixed_latency(lut, model.net());
}

double SearchTrainer::expected_latency() const {
  std::vector<StageLatency> stages;
  for (std::size_t s = 0; s < arch_.alpha.size(); ++s) {
    stages.push_back({path_probs(arch_.alpha[s]), stage_latency_[s]});
  }
  return expected_network_latency(stages, fixed_latency_);
}

double SearchTrainer::weight_step() {
  const PathGate gate = sample_gates(arch_, gate_rng_);
  const Split batch = gather(data_.train, train_sampler_.next());
  const Tensor out = model_.forward(batch.inputs, gate);
  const LossResult loss = task_loss(data_.task, out, batch);
  if (!std::isfinite(loss.value)) {
    model_.clear_state();
    throw Error(ErrorCode::kNonFiniteLoss, "weight step loss is not finite; alpha=" + alpha_snapshot(arch_));
  }
  model_.backward(loss.grad);
  const auto params = model_.path_parameters(gate);
  const double wsq = squared_norm(params);
  sgd_step(params, cfg_.lr_weights, cfg_.lambda1);
  return total_loss(loss.value, wsq, expected_latency(), cfg_);
}

double SearchTrainer::arch_step() {
  const PathGate gate = sample_gates(arch_, gate_rng_);
  const Split batch = gather(data_.val, val_sampler_.next());
  const Tensor out = model_.forward(batch.inputs, gate);
  const LossResult loss = task_loss(data_.task, out, batch);
  if (!std::isfinite(loss.value)) {
    model_.clear_state();
    throw Error(ErrorCode::kNonFiniteLoss, "architecture step loss is not finite; alpha=" + alpha_snapshot(arch_));
  }
  model_.backward(loss.grad);
  // Weight gradients from this pass are discarded; weights stay frozen.
  const auto params = model_.path_parameters(gate);
  zero_grads(params);
  const auto& gate_grads = model_.gate_grads();
  for (std::size_t s = 0; s < arch_.alpha.size(); ++s) {
    auto& alpha = arch_.alpha[s];
    const auto p = path_probs(alpha);
    std::vector<double> dL_dg(p.size(), 0.0);
    dL_dg[static_cast<std::size_t>(gate.active[s])] = gate_grads[s];
    const auto g = arch_grad(dL_dg, p);
    const auto lat = latency_alpha_grad(p, stage_latency_[s]);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
      alpha[j] -= cfg_.lr_arch * (g[j] + cfg_.lambda2 * lat[j]);
    }
  }
  return loss.value;
}

RoundRecord SearchTrainer::snapshot(int round, double train_loss, double val_loss) const {
  RoundRecord r;
  r.round = round;
  r.train_loss = train_loss;
  r.val_loss = val_loss;
  r.e_latency_ms = expected_latency();
  for (const auto& a : arch_.alpha) {
    r.probs.push_back(path_probs(a));
    r.chosen.push_back(static_cast<int>(std::max_element(a.begin(), a.end()) - a.begin()));
  }
  return r;
}

void SearchTrainer::run() {
  const int start = static_cast<int>(history_.rounds.size());
  for (int r = 0; r < cfg_.rounds; ++r) {
    double train = 0.0, val = 0.0;
    for (int i = 0; i < cfg_.weight_steps_per_round; ++i) train += weight_step();
    for (int i = 0; i < cfg_.arch_steps_per_round; ++i) val += arch_step();
    history_.rounds.push_back(snapshot(start + r, train / std::max(cfg_.weight_steps_per_round, 1),
                                       val / std::max(cfg_.arch_steps_per_round, 1)));
  }
}

SearchResult train_search(SupernetModel& model, const Dataset& data, const LatencyTable& lut,
                          const SearchConfig& cfg) {
  SearchTrainer trainer(model, data, lut, cfg);
  trainer.run();
  return {trainer.arch(), trainer.history()};
}

}  // namespace hwnas
