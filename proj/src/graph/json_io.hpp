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

#include <initializer_list>
#include <string>
#include <vector>

#include "hwnas/graph.hpp"
#include "json.hpp"

// JSON encoding of shapes and operators, shared by every file format that
// embeds them.
namespace hwnas::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ordered_json shape_to_json(const TensorShape& s);
ordered_json op_to_json(const OperatorSpec& op);
ordered_json ops_to_json(const std::vector<OperatorSpec>& ops);

/// Throws ParseError(path.key) for any key outside `allowed`.
void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed);
const json& require(const json& obj, const std::string& path, const char* key);
int positive_int(const json& v, const std::string& path);
TensorShape parse_shape(const json& v, const std::string& path);
OperatorSpec parse_op(const json& j, const std::string& path);

}  // namespace hwnas::detail
