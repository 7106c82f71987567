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

#include "hwnas/error.hpp"
#include "hwnas/search.hpp"

namespace hwnas {

ArchParams ArchParams::zeros(const SuperNet& net) {
  ArchParams a;
  for (const auto& stage : net.stages) a.alpha.emplace_back(stage.candidates.size(), 0.0);
  return a;
}

std::vector<double> PathGate::one_hot(std::size_t stage, std::size_t num_candidates) const {
  std::vector<double> g(num_candidates, 0.0);
  g.at(static_cast<std::size_t>(active.at(stage))) = 1.0;
  return g;
}

std::vector<double> path_probs(std::span<const double> alpha) {
  if (alpha.empty()) return {};
  const double top = *std::max_element(alpha.begin(), alpha.end());
  std::vector<double> p(alpha.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    p[i] = std::exp(alpha[i] - top);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

int sample_gate(std::span<const double> p, Rng& rng) { return static_cast<int>(rng.categorical(p)); }

PathGate sample_gates(const ArchParams& arch, Rng& rng) {
  PathGate gate;
  for (const auto& a : arch.alpha) gate.active.push_back(sample_gate(path_probs(a), rng));
  return gate;
}

std::vector<double> arch_grad(std::span<const double> dL_dg, std::span<const double> p) {
  if (dL_dg.size() != p.size()) {
    throw Error(ErrorCode::kLengthMismatch, "arch_grad: " + std::to_string(dL_dg.size()) +
                                                " gate gradients for " + std::to_string(p.size()) +
                                                " probabilities");
  }
  // sum_j c_j p_j (delta_ij - p_i) = p_i c_i - p_i sum_j c_j p_j
  double mean = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) mean += dL_dg[j] * p[j];
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) g[i] = p[i] * (dL_dg[i] - mean);
  return g;
}

double total_loss(double ce, double weight_sq_norm, double e_latency, const SearchConfig& cfg) {
  return ce + cfg.lambda1 * weight_sq_norm + cfg.lambda2 * e_latency;
}

CompactNet derive_compact(const SuperNet& net, const ArchParams& arch) {
  if (arch.alpha.size() != net.stages.size()) {
    throw Error(ErrorCode::kLengthMismatch, "derive_compact: " + std::to_string(arch.alpha.size()) +
                                                " alpha vectors for " + std::to_string(net.stages.size()) +
                                                " stages");
  }
  std::vector<int> choices;
  std::vector<bool> ties;
  for (std::size_t s = 0; s < net.stages.size(); ++s) {
    const auto& a = arch.alpha[s];
    if (a.size() != net.stages[s].candidates.size()) {
      throw Error(ErrorCode::kLengthMismatch, "derive_compact: stage " + std::to_string(s) +
                                                  " alpha length differs from its candidate count");
    }
    const auto best = std::max_element(a.begin(), a.end());  // first maximum
    choices.push_back(static_cast<int>(best - a.begin()));
    ties.push_back(std::count(a.begin(), a.end(), *best) > 1);
  }
  CompactNet out = compose(net, choices);
  out.derivation->ties = std::move(ties);
  return out;
}

}  // namespace hwnas
