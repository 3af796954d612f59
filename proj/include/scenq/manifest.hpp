// Copyright 2026 The scenq Authors
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

#ifndef SCENQ__MANIFEST_HPP_
#define SCENQ__MANIFEST_HPP_

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace scenq
{

inline constexpr const char * kToolVersion = "0.3.0";

/// Reproducibility record written next to every command's outputs.
struct RunManifest
{
  std::string command;
  std::vector<std::string> inputs;
  std::string config_hash;
  std::vector<std::string> outputs;
  std::string tool_version{kToolVersion};
  std::string started;
  std::string finished;
};

/// Lower-case hex SHA-256 of the bytes.
std::string content_digest(std::string_view bytes);

/// ISO 8601 UTC, second resolution.
std::string utc_timestamp();

/// Full manifest, timestamps included.
nlohmann::json to_json(const RunManifest & manifest);
/// Manifest without timestamps, for embedding in deterministic reports.
nlohmann::json provenance_json(const RunManifest & manifest);

}  // namespace scenq

#endif  // SCENQ__MANIFEST_HPP_
