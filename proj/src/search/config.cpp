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

#include <set>

#include "common/format.hpp"
#include "hwnas/error.hpp"
#include "hwnas/search.hpp"
#include "json.hpp"

namespace hwnas {

namespace {

using nlohmann::ordered_json;

template <typename T>
void read_field(const ordered_json& j, const char* name, T& out) {
  if (!j.contains(name)) return;
  try {
    out = j.at(name).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("$.") + name, e.what());
  }
}

void require_positive(int v, const char* name) {
  if (v <= 0) throw ParseError(std::string("$.") + name, "must be a positive integer");
}

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0)) throw ParseError(std::string("$.") + name, "must be non-negative");
}

}  // namespace

std::string to_json(const SearchConfig& cfg) {
  ordered_json j;
  j["lambda1"] = cfg.lambda1;
  j["lambda2"] = cfg.lambda2;
  j["lr_weights"] = cfg.lr_weights;
  j["lr_arch"] = cfg.lr_arch;
  j["weight_steps_per_round"] = cfg.weight_steps_per_round;
  j["arch_steps_per_round"] = cfg.arch_steps_per_round;
  j["rounds"] = cfg.rounds;
  j["batch_size"] = cfg.batch_size;
  j["seed"] = cfg.seed;
  j["latency_source"] = cfg.latency_source;
  return j.dump(2) + "\n";
}

SearchConfig search_config_from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("byte " + std::to_string(e.byte), e.what());
  }
  if (!j.is_object()) throw ParseError("$", "search config must be an object");
  static const std::set<std::string> known = {
      "lambda1", "lambda2", "lr_weights", "lr_arch", "weight_steps_per_round",
      "arch_steps_per_round", "rounds", "batch_size", "seed", "latency_source"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw ParseError("$." + key, "unknown field");
  }
  SearchConfig cfg;
  read_field(j, "lambda1", cfg.lambda1);
  read_field(j, "lambda2", cfg.lambda2);
  read_field(j, "lr_weights", cfg.lr_weights);
  read_field(j, "lr_arch", cfg.lr_arch);
  read_field(j, "weight_steps_per_round", cfg.weight_steps_per_round);
  read_field(j, "arch_steps_per_round", cfg.arch_steps_per_round);
  read_field(j, "rounds", cfg.rounds);
  read_field(j, "batch_size", cfg.batch_size);
  read_field(j, "seed", cfg.seed);
  read_field(j, "latency_source", cfg.latency_source);
  require_non_negative(cfg.lambda1, "lambda1");
  require_non_negative(cfg.lambda2, "lambda2");
  if (!(cfg.lr_weights > 0.0)) throw ParseError("$.lr_weights", "must be positive");
  if (!(cfg.lr_arch > 0.0)) throw ParseError("$.lr_arch", "must be positive");
  require_positive(cfg.weight_steps_per_round, "weight_steps_per_round");
  require_positive(cfg.arch_steps_per_round, "arch_steps_per_round");
  if (cfg.rounds < 0) throw ParseError("$.rounds", "must be non-negative");
  require_positive(cfg.batch_size, "batch_size");
  return cfg;
}

std::string SearchHistory::to_csv() const {
  std::string out = "round,train_loss,val_loss,e_latency_ms";
  if (!rounds.empty()) {
    const auto& probs = rounds.front().probs;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      for (std::size_t j = 0; j < probs[i].size(); ++j) {
        out += ",stage" + std::to_string(i) + "_cand" + std::to_string(j);
      }
    }
  }
  out += '\n';
  for (const auto& r : rounds) {
    out += std::to_string(r.round) + ',' + format_double(r.train_loss) + ',' +
           format_double(r.val_loss) + ',' + format_double(r.e_latency_ms);
    for (const auto& stage : r.probs) {
      for (double p : stage) out += ',' + format_double(p);
    }
    out += '\n';
  }
  return out;
}

}  // namespace hwnas
