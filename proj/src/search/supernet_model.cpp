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

#include "hwnas/error.hpp"
#include "hwnas/search.hpp"

namespace hwnas {

namespace {

constexpr std::uint64_t kHeadStream = std::uint64_t{1} << 32;

ModuleInstance make_module(const OperatorSpec& op, const TensorShape& in, std::uint64_t seed) {
  Rng rng(seed);
  return ModuleInstance(op, in, rng);
}

double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

SupernetModel::SupernetModel(const SuperNet& net, std::uint64_t seed) : net_(net) {
  infer_shapes(net);  // throws on an inconsistent supernet
  TensorShape shape = net.input_shape;
  for (std::size_t i = 0; i < net.stem.size(); ++i) {
    stem_.push_back(make_module(net.stem[i], shape, mix_seed(seed, 0, i)));
    shape = stem_.back().output_shape();
  }
  for (std::size_t s = 0; s < net.stages.size(); ++s) {
    auto& chains = stages_.emplace_back();
    const auto& stage = net.stages[s];
    for (std::size_t c = 0; c < stage.candidates.size(); ++c) {
      auto& chain = chains.emplace_back();
      TensorShape x = stage.input_shape;
      for (std::size_t j = 0; j < stage.candidates[c].size(); ++j) {
        chain.push_back(make_module(stage.candidates[c][j], x, mix_seed(seed, s + 1, c * 1000 + j)));
        x = chain.back().output_shape();
      }
    }
    shape = stage.output_shape;
  }
  for (std::size_t i = 0; i < net.head.size(); ++i) {
    head_.push_back(make_module(net.head[i], shape, mix_seed(seed, kHeadStream, i)));
    shape = head_.back().output_shape();
  }
}

Tensor SupernetModel::forward(const Tensor& input, const PathGate& gate) {
  if (gate.active.size() != stages_.size()) {
    throw Error(ErrorCode::kLengthMismatch, "gate covers " + std::to_string(gate.active.size()) +
                                                " stages, supernet has " + std::to_string(stages_.size()));
  }
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    const int a = gate.active[s];
    if (a < 0 || static_cast<std::size_t>(a) >= stages_[s].size()) {
      throw Error(ErrorCode::kInvalidArgument, "gate index " + std::to_string(a) + " out of range in stage " +
                                                   std::to_string(s));
    }
  }
  clear_state();
  gate_ = gate;
  Tensor x = input;
  for (auto& m : stem_) x = m.forward(x);
  stage_outputs_.clear();
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    for (auto& m : stages_[s][static_cast<std::size_t>(gate.active[s])]) x = m.forward(x);
    stage_outputs_.push_back(x);
  }
  for (auto& m : head_) x = m.forward(x);
  retained_ = true;
  return x;
}

Tensor SupernetModel::backward(const Tensor& upstream) {
  if (!retained_) throw Error(ErrorCode::kStaleState, "supernet backward without a retained forward");
  Tensor g = upstream;
  for (auto it = head_.rbegin(); it != head_.rend(); ++it) g = it->backward(g);
  gate_grads_.assign(stages_.size(), 0.0);
  for (std::size_t s = stages_.size(); s-- > 0;) {
    // The stage output is g_s * o_s(x) with the open gate equal to 1.
    gate_grads_[s] = dot(g, stage_outputs_[s]);
    auto& chain = stages_[s][static_cast<std::size_t>(gate_.active[s])];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) g = it->backward(g);
  }
  for (auto it = stem_.rbegin(); it != stem_.rend(); ++it) g = it->backward(g);
  stage_outputs_.clear();
  retained_ = false;
  return g;
}

void SupernetModel::clear_state() {
  for (auto& m : stem_) m.clear_state();
  for (auto& chains : stages_) {
    for (auto& chain : chains) {
      for (auto& m : chain) m.clear_state();
    }
  }
  for (auto& m : head_) m.clear_state();
  stage_outputs_.clear();
  retained_ = false;
}

std::vector<NamedParameter> SupernetModel::parameters() {
  std::vector<NamedParameter> out;
  auto add = [&out](ModuleInstance& m, const std::string& prefix) {
    for (auto& [name, p] : m.parameters()) out.emplace_back(prefix + name, p);
  };
  for (std::size_t i = 0; i < stem_.size(); ++i) add(stem_[i], "stem[" + std::to_string(i) + "].");
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    for (std::size_t c = 0; c < stages_[s].size(); ++c) {
      for (std::size_t j = 0; j < stages_[s][c].size(); ++j) {
        add(stages_[s][c][j], "stages[" + std::to_string(s) + "].candidates[" + std::to_string(c) + "][" +
                                  std::to_string(j) + "].");
      }
    }
  }
  for (std::size_t i = 0; i < head_.size(); ++i) add(head_[i], "head[" + std::to_string(i) + "].");
  return out;
}

std::vector<Parameter*> SupernetModel::path_parameters(const PathGate& gate) {
  std::vector<Parameter*> out;
  auto add = [&out](ModuleInstance& m) {
    for (auto& [name, p] : m.parameters()) out.push_back(p);
  };
  for (auto& m : stem_) add(m);
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    for (auto& m : stages_[s].at(static_cast<std::size_t>(gate.active.at(s)))) add(m);
  }
  for (auto& m : head_) add(m);
  return out;
}

std::vector<Parameter*> SupernetModel::all_parameters() {
  std::vector<Parameter*> out;
  for (auto& [name, p] : parameters()) out.push_back(p);
  return out;
}

}  // namespace hwnas
