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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hwnas/data.hpp"
#include "hwnas/graph.hpp"
#include "hwnas/latency.hpp"
#include "hwnas/nn.hpp"
#include "hwnas/rng.hpp"

namespace hwnas {

/// Architecture parameters: one real vector per stage, one entry per candidate.
struct ArchParams {
  std::vector<std::vector<double>> alpha;

  /// All zeros, i.e. uniform path probabilities.
  static ArchParams zeros(const SuperNet& net);
  bool operator==(const ArchParams&) const = default;
};

/// Sampled binary gates, stored as the index of the single open gate per stage.
struct PathGate {
  std::vector<int> active;

  /// The one-hot vector of stage `stage` with `num_candidates` entries.
  std::vector<double> one_hot(std::size_t stage, std::size_t num_candidates) const;
};

/// softmax(alpha) with max subtraction.
std::vector<double> path_probs(std::span<const double> alpha);
int sample_gate(std::span<const double> p, Rng& rng);
PathGate sample_gates(const ArchParams& arch, Rng& rng);

/// dL/dalpha_i = sum_j dL/dg_j * p_j * (delta_ij - p_i).
///
/// Uses the full softmax Jacobian dp_j/dalpha_i = p_j (delta_ij - p_i). The
/// common single-line statement of this estimator drops the p_j factor; with
/// it, the result is the exact gradient of the linearized loss sum_j p_j dL/dg_j.
std::vector<double> arch_grad(std::span<const double> dL_dg, std::span<const double> p);

struct SearchConfig {
  double lambda1 = 1e-4;  ///< weight decay, the ||w||^2 coefficient
  double lambda2 = 0.0;   ///< latency weight, per millisecond
  double lr_weights = 0.01;
  double lr_arch = 1.0;
  int weight_steps_per_round = 10;
  int arch_steps_per_round = 5;
  int rounds = 30;
  int batch_size = 32;
  std::uint64_t seed = 42;
  /// Path of the `.lut.json` the search reads (informational for the library).
  std::string latency_source;

  bool operator==(const SearchConfig&) const = default;
};

std::string to_json(const SearchConfig& cfg);
/// Missing fields keep their defaults; unknown fields are rejected.
SearchConfig search_config_from_json(std::string_view text);

/// ce + lambda1 * ||w||^2 + lambda2 * E[latency].
double total_loss(double ce, double weight_sq_norm, double e_latency, const SearchConfig& cfg);

struct RoundRecord {
  int round = 0;
  /// Mean total loss of the round's weight steps (active-path ||w||^2).
  double train_loss = 0.0;
  /// Mean task loss of the round's architecture steps.
  double val_loss = 0.0;
  double e_latency_ms = 0.0;
  std::vector<std::vector<double>> probs;
  std::vector<int> chosen;  ///< argmax path per stage after the round

  bool operator==(const RoundRecord&) const = default;
};

struct SearchHistory {
  std::vector<RoundRecord> rounds;

  /// round,train_loss,val_loss,e_latency_ms,stage{i}_cand{j}...
  std::string to_csv() const;
  bool operator==(const SearchHistory&) const = default;
};

/// Executable supernet with separate weights for every candidate path.
/// Parameters are named stem[i].*, stages[s].candidates[c][j].* and head[i].*.
class SupernetModel {
 public:
  SupernetModel(const SuperNet& net, std::uint64_t seed);

  const SuperNet& net() const { return net_; }

  /// Runs the path selected by `gate`; retains activations for backward().
  Tensor forward(const Tensor& input, const PathGate& gate);
  /// Accumulates weight gradients along the active path and records
  /// dL/dg of every stage's open gate, <dL/dy_s, y_s>.
  Tensor backward(const Tensor& upstream);
  const std::vector<double>& gate_grads() const { return gate_grads_; }
  void clear_state();

  std::vector<NamedParameter> parameters();
  /// Stem, head and the chosen candidate of every stage.
  std::vector<Parameter*> path_parameters(const PathGate& gate);
  std::vector<Parameter*> all_parameters();

 private:
  using Chain = std::vector<ModuleInstance>;

  SuperNet net_;
  std::vector<ModuleInstance> stem_;
  std::vector<std::vector<Chain>> stages_;
  std::vector<ModuleInstance> head_;
  PathGate gate_;
  std::vector<Tensor> stage_outputs_;
  std::vector<double> gate_grads_;
  bool retained_ = false;
};

/// Alternating single-path weight and architecture updates.
class SearchTrainer {
 public:
  /// Looks up every candidate latency up front (throws MissingEntryError).
  SearchTrainer(SupernetModel& model, const Dataset& data, const LatencyTable& lut,
                const SearchConfig& cfg);

  /// One SGD step on a train batch through freshly sampled gates; only the
  /// sampled path's weights change. Returns the total loss.
  double weight_step();
  /// One gradient step on alpha from a validation batch through freshly
  /// sampled gates, plus lambda2 times the exact latency gradient. Network
  /// weights are left untouched. Returns the task loss.
  double arch_step();
  /// Runs cfg.rounds rounds and appends one record per round.
  void run();

  const ArchParams& arch() const { return arch_; }
  const SearchHistory& history() const { return history_; }
  double expected_latency() const;

 private:
  RoundRecord snapshot(int round, double train_loss, double val_loss) const;

  SupernetModel& model_;
  const Dataset& data_;
  SearchConfig cfg_;
  ArchParams arch_;
  std::vector<std::vector<double>> stage_latency_;
  double fixed_latency_ = 0.0;
  Rng gate_rng_;
  BatchSampler train_sampler_;
  BatchSampler val_sampler_;
  SearchHistory history_;
};

struct SearchResult {
  ArchParams arch;
  SearchHistory history;
};

/// Throws Error(kNonFiniteLoss) with the round, step and current alpha.
SearchResult train_search(SupernetModel& model, const Dataset& data, const LatencyTable& lut,
                          const SearchConfig& cfg);

/// Argmax alpha per stage; exact ties go to the lowest index and are flagged
/// in the derivation metadata.
CompactNet derive_compact(const SuperNet& net, const ArchParams& arch);

}  // namespace hwnas
