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

#include <cmath>
#include <sstream>

#include "graph/json_io.hpp"
#include "hwnas/costmodel.hpp"
#include "hwnas/error.hpp"

namespace hwnas {

using detail::json;
using detail::ordered_json;

std::string to_jsonl(std::span<const ProfileRecord> records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json j;
    j["op"] = detail::op_to_json(r.op);
    j["input_shape"] = detail::shape_to_json(r.input);
    j["measured_cycles"] = r.measured_cycles;
    out += j.dump() + '\n';
  }
  return out;
}

std::vector<ProfileRecord> records_from_jsonl(std::string_view text) {
  std::vector<ProfileRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string path = "line " + std::to_string(line_no);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(path, e.what());
    }
    detail::check_keys(j, path, {"op", "input_shape", "measured_cycles"});
    ProfileRecord r;
    r.op = detail::parse_op(detail::require(j, path, "op"), path + ".op");
    r.input = detail::parse_shape(detail::require(j, path, "input_shape"), path + ".input_shape");
    const auto& cycles = detail::require(j, path, "measured_cycles");
    if (!cycles.is_number()) throw ParseError(path + ".measured_cycles", "expected a number");
    r.measured_cycles = cycles.get<double>();
    if (!std::isfinite(r.measured_cycles) || r.measured_cycles <= 0.0) {
      throw ParseError(path + ".measured_cycles", "must be finite and positive");
    }
    std::string why;
    if (!try_output_shape(r.op, r.input, &why)) throw ParseError(path + ".op", why);
    out.push_back(r);
  }
  return out;
}

}  // namespace hwnas
