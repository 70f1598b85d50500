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

#include "forge/cli/config.h"

#include <cstdlib>

#include "forge/common/files.h"
#include "forge/common/hash.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"

namespace forge::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

absl::StatusOr<docindex::SplitConfig> SplitConfigFromJson(const json& j,
                                                          docindex::SplitConfig c) {
  if (!j.is_object()) return absl::InvalidArgumentError("docs config must be an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "max_depth") c.max_depth = it.value().get<int>();
      else if (it.key() == "summary_chars") c.summary_chars = it.value().get<size_t>();
      else return absl::InvalidArgumentError(StrCat("unknown docs config key '", it.key(), "'"));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad docs config: ", e.what()));
  }
  if (c.max_depth < 1) return absl::InvalidArgumentError("docs max_depth must be >= 1");
  return c;
}

absl::StatusOr<EvalSettings> EvalSettingsFromJson(const json& j, EvalSettings c) {
  if (!j.is_object()) return absl::InvalidArgumentError("eval config must be an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "ks") c.ks = it.value().get<std::vector<int>>();
      else if (it.key() == "jobs") c.jobs = it.value().get<int>();
      else if (it.key() == "samples_per_problem") c.samples_per_problem = it.value().get<int>();
      else if (it.key() == "label") c.label = it.value().get<std::string>();
      else return absl::InvalidArgumentError(StrCat("unknown eval config key '", it.key(), "'"));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad eval config: ", e.what()));
  }
  if (c.ks.empty()) return absl::InvalidArgumentError("eval ks must not be empty");
  for (int k : c.ks) {
    if (k < 1) return absl::InvalidArgumentError("eval ks must be >= 1");
  }
  if (c.jobs < 1) return absl::InvalidArgumentError("eval jobs must be >= 1");
  if (c.samples_per_problem < 1) {
    return absl::InvalidArgumentError("eval samples_per_problem must be >= 1");
  }
  return c;
}

absl::StatusOr<DatasetSettings> DatasetSettingsFromJson(const json& j, DatasetSettings c) {
  if (!j.is_object()) return absl::InvalidArgumentError("dataset config must be an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "ratio") {
        FORGE_ASSIGN_OR_RETURN(c.ratio, dataset::ParseRatio(it.value().get<std::string>()));
      } else if (it.key() == "seed") {
        c.seed = it.value().get<uint64_t>();
      } else if (it.key() == "name") {
        c.name = it.value().get<std::string>();
      } else {
        return absl::InvalidArgumentError(StrCat("unknown dataset config key '", it.key(), "'"));
      }
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad dataset config: ", e.what()));
  }
  return c;
}

}  // namespace

ForgeConfig DefaultConfig() {
  ForgeConfig c;
  for (const char* role : kLlmRoles) c.llm[role] = llm::LlmConfig{};
  c.judge.temperature = 0.3;
  return c;
}

absl::StatusOr<ForgeConfig> ConfigFromJson(const json& j) {
  ForgeConfig c = DefaultConfig();
  if (!j.is_object()) return absl::InvalidArgumentError("config must be a JSON object");
  // llm.default first so roles inherit from it regardless of key order.
  llm::LlmConfig base;
  if (j.contains("llm")) {
    const json& l = j["llm"];
    if (!l.is_object()) return absl::InvalidArgumentError("llm config must be an object");
    if (l.contains("default")) {
      FORGE_ASSIGN_OR_RETURN(base, llm::LlmConfigFromJson(l["default"]));
    }
    for (const char* role : kLlmRoles) c.llm[role] = base;
    for (auto it = l.begin(); it != l.end(); ++it) {
      if (it.key() == "default") continue;
      if (!c.llm.count(it.key())) {
        return absl::InvalidArgumentError(StrCat("unknown llm role '", it.key(), "'"));
      }
      absl::StatusOr<llm::LlmConfig> role = llm::LlmConfigFromJson(it.value(), base);
      if (!role.ok()) {
        return absl::InvalidArgumentError(StrCat("llm.", it.key(), ": ", role.status().message()));
      }
      c.llm[it.key()] = *role;
    }
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "llm") continue;
    if (k == "filter") {
      FORGE_ASSIGN_OR_RETURN(c.filter, corpus::FilterConfigFromJson(v, c.filter));
    } else if (k == "docs") {
      FORGE_ASSIGN_OR_RETURN(c.docs, SplitConfigFromJson(v, c.docs));
    } else if (k == "distill") {
      FORGE_ASSIGN_OR_RETURN(c.distill, distill::DistillConfigFromJson(v, c.distill));
    } else if (k == "templates_dir") {
      if (!v.is_string()) return absl::InvalidArgumentError("templates_dir must be a string");
      c.templates_dir = v.get<std::string>();
    } else if (k == "dataset") {
      FORGE_ASSIGN_OR_RETURN(c.dataset, DatasetSettingsFromJson(v, c.dataset));
    } else if (k == "toolchain") {
      FORGE_ASSIGN_OR_RETURN(c.toolchain, eval::ToolchainConfigFromJson(v));
    } else if (k == "eval") {
      FORGE_ASSIGN_OR_RETURN(c.eval, EvalSettingsFromJson(v, c.eval));
    } else if (k == "judge") {
      FORGE_ASSIGN_OR_RETURN(c.judge, judge::JudgeConfigFromJson(v, c.judge));
    } else {
      return absl::InvalidArgumentError(StrCat("unknown config section '", k, "'"));
    }
  }
  return c;
}

absl::StatusOr<ForgeConfig> LoadConfig(const fs::path& path) {
  if (!fs::exists(path)) return absl::NotFoundError(StrCat("config not found: ", path.string()));
  FORGE_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(StrCat(path.string(), ": config is not valid JSON"));
  }
  absl::StatusOr<ForgeConfig> c = ConfigFromJson(j);
  if (!c.ok()) {
    return absl::Status(c.status().code(), StrCat(path.string(), ": ", c.status().message()));
  }
  // Relative paths inside the file are relative to the file.
  fs::path base = fs::absolute(path).parent_path();
  auto rebase = [&](fs::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  auto rebase_str = [&](std::string& s) {
    if (s.empty()) return;
    fs::path p(s);
    rebase(p);
    s = p.string();
  };
  for (auto& [role, l] : c->llm) {
    rebase_str(l.fixture_path);
    rebase_str(l.cache_dir);
  }
  rebase(c->templates_dir);
  rebase(c->toolchain.harness_dir);
  rebase(c->toolchain.work_root);
  return c;
}

json ConfigToJson(const ForgeConfig& c) {
  json llm = json::object();
  for (const auto& [role, l] : c.llm) llm[role] = llm::LlmConfigToJson(l);
  return {{"llm", llm},
          {"filter", corpus::FilterConfigToJson(c.filter)},
          {"docs", {{"max_depth", c.docs.max_depth}, {"summary_chars", c.docs.summary_chars}}},
          {"distill", distill::DistillConfigToJson(c.distill)},
          {"templates_dir", c.templates_dir.string()},
          {"dataset",
           {{"ratio", StrCat(c.dataset.ratio.completion_parts, ":", c.dataset.ratio.decompile_parts)},
            {"seed", c.dataset.seed},
            {"name", c.dataset.name}}},
          {"toolchain", eval::ToolchainConfigToJson(c.toolchain)},
          {"eval",
           {{"ks", c.eval.ks},
            {"jobs", c.eval.jobs},
            {"samples_per_problem", c.eval.samples_per_problem},
            {"label", c.eval.label}}},
          {"judge", judge::JudgeConfigToJson(c.judge)}};
}

std::string ConfigHash(const ForgeConfig& config) {
  // Secrets never enter the config, only the name of the env var holding them.
  return Sha256Hex(ConfigToJson(config).dump());
}

void ApplyEnvironment(ForgeConfig& config) {
  if (const char* dir = std::getenv("FORGE_CACHE_DIR"); dir != nullptr && *dir != '\0') {
    for (auto& [role, l] : config.llm) l.cache_dir = dir;
  }
}

absl::StatusOr<std::vector<int>> ParseKList(std::string_view text) {
  std::vector<int> ks;
  for (std::string_view part : SplitString(text, ',')) {
    std::string p(StripWhitespace(part));
    if (p.empty()) continue;
    char* end = nullptr;
    long v = std::strtol(p.c_str(), &end, 10);
    if (*end != '\0' || v < 1 || v > 1000000) {
      return absl::InvalidArgumentError(StrCat("bad k value '", p, "'"));
    }
    ks.push_back(static_cast<int>(v));
  }
  if (ks.empty()) return absl::InvalidArgumentError("no k values given");
  return ks;
}

}  // namespace forge::cli
