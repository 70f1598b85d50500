// Copyright 2026 The Forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "forge/cli/manifest.h"

#include <chrono>
#include <ctime>

#include "forge/common/files.h"
#include "forge/common/hash.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"

namespace forge::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string UtcNow() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()) % 1000;
  std::tm tm;
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  return fmt::format("{}.{:03d}Z", buf, static_cast<int>(ms.count()));
}

std::string ManifestPathFor(const fs::path& primary_output) {
  return primary_output.string() + ".manifest.json";
}

absl::Status AddArtifact(RunManifest& manifest, const fs::path& path) {
  FORGE_ASSIGN_OR_RETURN(std::string sha, Sha256File(path));
  std::error_code ec;
  uintmax_t bytes = fs::file_size(path, ec);
  manifest.artifacts.push_back({path.string(), std::move(sha), ec ? 0 : bytes});
  return absl::OkStatus();
}

json ManifestToJson(const RunManifest& m) {
  json artifacts = json::array();
  for (const Artifact& a : m.artifacts) {
    artifacts.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  }
  return {{"command_line", m.command_line}, {"subcommand", m.subcommand},
          {"config_hash", m.config_hash},   {"tool_versions", m.tool_versions},
          {"started_at", m.started_at},     {"finished_at", m.finished_at},
          {"artifacts", artifacts},         {"exit_code", m.exit_code}};
}

absl::Status WriteManifest(const RunManifest& manifest, const fs::path& primary_output) {
  return WriteFileAtomic(ManifestPathFor(primary_output), ManifestToJson(manifest).dump(2) + "\n");
}

}  // namespace forge::cli
