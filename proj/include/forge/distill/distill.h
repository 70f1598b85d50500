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

#ifndef FORGE_DISTILL_DISTILL_H_
#define FORGE_DISTILL_DISTILL_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "forge/corpus/corpus.h"
#include "forge/distill/prompts.h"
#include "forge/distill/trace.h"
#include "forge/llm/client.h"
#include "nlohmann/json.hpp"

namespace forge::distill {

struct DistilledExample {
  std::string sample_id;
  DistillTask task = DistillTask::kSpecToChisel;
  std::string system_text;
  std::string prompt_text;  // student-facing, guidance stripped
  ReasoningTrace trace;
  std::string teacher_model;
  Validation validation;
  std::vector<std::string> doc_ids;  // guidance fragments (S2C)
  int attempts = 1;

  friend bool operator==(const DistilledExample&, const DistilledExample&) = default;
};

// Includes a `messages` array (system, user, assistant with think block)
// so records can be fed to chat-format trainers unchanged.
nlohmann::json ExampleToJson(const DistilledExample& example);
absl::StatusOr<DistilledExample> ExampleFromJson(const nlohmann::json& json);

// Returns the first guidance text (doc body, benchmark, feature catalog)
// that appears verbatim in `student_prompt`, or an empty string.
std::string FindLeakage(std::string_view student_prompt, const GuidanceBundle& bundle);

struct DistillConfig {
  std::string teacher_model;
  double temperature = 0.6;
  int max_output_tokens = 16384;
  int parallelism = 4;
  // Extra teacher calls for a rejected trace.
  int retry_rejected = 0;
  size_t max_docs = 10;
  ValidatorConfig validator;
};

nlohmann::json DistillConfigToJson(const DistillConfig& config);
absl::StatusOr<DistillConfig> DistillConfigFromJson(const nlohmann::json& json,
                                                    DistillConfig defaults = {});

class Distiller {
 public:
  Distiller(llm::ChatClient& teacher, PromptTemplates templates, DistillConfig config)
      : teacher_(teacher), templates_(std::move(templates)), config_(std::move(config)) {}

  absl::StatusOr<PromptPair> BuildPrompts(const corpus::CodeSample& sample,
                                          const GuidanceBundle& bundle) const;

  // Prompt construction errors fail the call; teacher and parse failures
  // come back as Rejected examples.
  absl::StatusOr<DistilledExample> Synthesize(const corpus::CodeSample& sample,
                                              const GuidanceBundle& bundle);

  // Input order; parallel over samples.
  std::vector<absl::StatusOr<DistilledExample>> SynthesizeAll(
      const std::vector<corpus::CodeSample>& samples,
      const std::vector<GuidanceBundle>& bundles);

  const PromptTemplates& templates() const { return templates_; }
  const DistillConfig& config() const { return config_; }

 private:
  llm::ChatClient& teacher_;
  PromptTemplates templates_;
  DistillConfig config_;
};

}  // namespace forge::distill

#endif  // FORGE_DISTILL_DISTILL_H_
