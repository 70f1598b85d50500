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

#ifndef FORGE_CLI_MANIFEST_H_
#define FORGE_CLI_MANIFEST_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "nlohmann/json.hpp"

namespace forge::cli {

struct Artifact {
  std::string path;
  std::string sha256;
  uintmax_t bytes = 0;
};

// Provenance record written next to a subcommand's primary output.
struct RunManifest {
  std::string command_line;
  std::string subcommand;
  std::string config_hash;
  std::map<std::string, std::string> tool_versions;
  std::string started_at;
  std::string finished_at;
  std::vector<Artifact> artifacts;
  int exit_code = 0;
};

std::string UtcNow();
std::string ManifestPathFor(const std::filesystem::path& primary_output);
absl::Status AddArtifact(RunManifest& manifest, const std::filesystem::path& path);
nlohmann::json ManifestToJson(const RunManifest& manifest);
absl::Status WriteManifest(const RunManifest& manifest, const std::filesystem::path& primary_output);

}  // namespace forge::cli

#endif  // FORGE_CLI_MANIFEST_H_
