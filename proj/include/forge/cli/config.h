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

#ifndef FORGE_CLI_CONFIG_H_
#define FORGE_CLI_CONFIG_H_

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "forge/corpus/corpus.h"
#include "forge/dataset/dataset.h"
#include "forge/distill/distill.h"
#include "forge/docindex/docindex.h"
#include "forge/eval/harness.h"
#include "forge/judge/judge.h"
#include "forge/llm/client.h"
#include "nlohmann/json.hpp"

namespace forge::cli {

// Model roles a run can talk to. Each role starts from llm.default and
// applies its own overrides.
inline constexpr const char* kLlmRoles[] = {"annotator", "teacher", "judge", "generator"};

struct EvalSettings {
  std::vector<int> ks = {1, 5};
  int jobs = 4;
  // Completions per problem that are evaluated; extra ones are ignored.
  int samples_per_problem = 10;
  std::string label = "candidate";
};

struct DatasetSettings {
  dataset::MixRatio ratio;
  uint64_t seed = 0;
  std::string name = "mixed";
};

// The one configuration file shared by all subcommands. Every section is
// optional and unknown keys are rejected.
struct ForgeConfig {
  std::map<std::string, llm::LlmConfig> llm;  // by role
  corpus::FilterConfig filter;
  docindex::SplitConfig docs;
  distill::DistillConfig distill;
  std::filesystem::path templates_dir;
  DatasetSettings dataset;
  eval::ToolchainConfig toolchain;
  EvalSettings eval;
  judge::JudgeConfig judge;
};

ForgeConfig DefaultConfig();
absl::StatusOr<ForgeConfig> ConfigFromJson(const nlohmann::json& j);
absl::StatusOr<ForgeConfig> LoadConfig(const std::filesystem::path& path);
nlohmann::json ConfigToJson(const ForgeConfig& config);
// Stable hash of the effective configuration.
std::string ConfigHash(const ForgeConfig& config);

// Env overrides sit between the file and explicit flags: FORGE_CACHE_DIR
// replaces every role's cache dir.
void ApplyEnvironment(ForgeConfig& config);

absl::StatusOr<std::vector<int>> ParseKList(std::string_view text);

}  // namespace forge::cli

#endif  // FORGE_CLI_CONFIG_H_
