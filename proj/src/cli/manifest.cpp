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

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <sstream>

#include "hwnas/cli.hpp"
#include "hwnas/error.hpp"
#include "hwnas/graph.hpp"
#include "json.hpp"

namespace hwnas {

std::string sha256_hex(std::string_view text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string content_hash(std::string_view text) {
  std::string stripped;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    if (line.find("\"created\"") == std::string_view::npos) {
      stripped.append(line);
      stripped += '\n';
    }
    start = end + 1;
  }
  return sha256_hex(stripped);
}

void RunManifest::record(const std::string& kind, const std::string& path, const std::string& base_dir) {
  namespace fs = std::filesystem;
  std::string stored = path;
  if (!base_dir.empty()) {
    const fs::path base = fs::absolute(base_dir).lexically_normal();
    stored = fs::absolute(path).lexically_normal().lexically_relative(base).string();
  }
  ManifestArtifact a{kind, stored, content_hash(read_text(path))};
  auto it = std::find_if(artifacts.begin(), artifacts.end(), [&](const auto& x) { return x.path == a.path; });
  if (it != artifacts.end()) {
    *it = std::move(a);
  } else {
    artifacts.push_back(std::move(a));
  }
}

std::vector<ManifestArtifact> RunManifest::of_kind(std::string_view kind) const {
  std::vector<ManifestArtifact> out;
  for (const auto& a : artifacts) {
    if (a.kind == kind) out.push_back(a);
  }
  return out;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "hwnas.manifest";
  j["version"] = 1;
  j["tool_version"] = tool_version;
  j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    j["runs"].push_back({{"command", r.command}, {"seed", r.seed}, {"config_hash", r.config_hash}});
  }
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& a : artifacts) {
    j["artifacts"].push_back({{"kind", a.kind}, {"path", a.path}, {"sha256", a.sha256}});
  }
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.at("format") != "hwnas.manifest") throw ParseError("$.format", "not a run manifest");
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    for (const auto& r : j.at("runs")) {
      m.runs.push_back({r.at("command").get<std::string>(), r.at("seed").get<std::uint64_t>(),
                        r.at("config_hash").get<std::string>()});
    }
    for (const auto& a : j.at("artifacts")) {
      m.artifacts.push_back(
          {a.at("kind").get<std::string>(), a.at("path").get<std::string>(), a.at("sha256").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("$", std::string("manifest: ") + e.what());
  }
}

RunManifest RunManifest::load_or_empty(const std::string& path) {
  if (!std::filesystem::exists(path)) return {};
  return from_json(read_text(path));
}

}  // namespace hwnas
