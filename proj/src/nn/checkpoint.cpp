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

#include <map>

#include "hwnas/error.hpp"
#include "hwnas/nn.hpp"
#include "json.hpp"

namespace hwnas {

std::string checkpoint_to_json(std::span<const NamedParameter> params) {
  nlohmann::ordered_json j;
  j["format"] = "hwnas.checkpoint";
  j["version"] = 1;
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
  for (const auto& [name, p] : params) {
    nlohmann::ordered_json e;
    e["dims"] = p->value.dims();
    e["data"] = std::vector<double>(p->value.data().begin(), p->value.data().end());
    entries[name] = std::move(e);
  }
  j["parameters"] = std::move(entries);
  return j.dump() + "\n";
}

void checkpoint_from_json(std::string_view text, std::span<const NamedParameter> params) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("checkpoint", e.what());
  }
  if (j.value("format", "") != "hwnas.checkpoint") throw ParseError("$.format", "not a checkpoint");
  if (j.value("version", 0) != 1) throw ParseError("$.version", "unsupported checkpoint version");
  const auto& entries = j.at("parameters");
  for (const auto& [name, p] : params) {
    auto it = entries.find(name);
    if (it == entries.end()) throw ParseError("$.parameters." + name, "missing parameter");
    const auto dims = it->at("dims").get<std::vector<std::size_t>>();
    auto data = it->at("data").get<std::vector<double>>();
    if (dims != p->value.dims()) {
      throw ParseError("$.parameters." + name + ".dims",
                       "expected " + dims_to_string(p->value.dims()) + ", got " + dims_to_string(dims));
    }
    p->value = Tensor(dims, std::move(data));
  }
}

}  // namespace hwnas
