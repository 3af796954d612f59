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

#include "scenq/manifest.hpp"

#include "scenq/error.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include <chrono>
#include <memory>

namespace scenq
{

std::string content_digest(std::string_view bytes)
{
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (
    !ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
    EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
    EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
    throw Error("sha256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex += fmt::format("{:02x}", md[i]);
  }
  return "sha256:" + hex;
}

std::string utc_timestamp()
{
  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(
    std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

nlohmann::json provenance_json(const RunManifest & manifest)
{
  return {
    {"command", manifest.command},
    {"inputs", manifest.inputs},
    {"config_hash", manifest.config_hash},
    {"outputs", manifest.outputs},
    {"tool_version", manifest.tool_version}};
}

nlohmann::json to_json(const RunManifest & manifest)
{
  nlohmann::json j = provenance_json(manifest);
  j["started"] = manifest.started;
  j["finished"] = manifest.finished;
  return j;
}

}  // namespace scenq
