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

#include "forge/distill/distill.h"

#include "forge/common/parallel.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"

namespace forge::distill {

using nlohmann::json;

json ExampleToJson(const DistilledExample& e) {
  json messages = json::array();
  messages.push_back({{"role", "system"}, {"content", e.system_text}});
  messages.push_back({{"role", "user"}, {"content", e.prompt_text}});
  messages.push_back({{"role", "assistant"}, {"content", RenderAssistantTurn(e.trace)}});
  return {{"sample_id", e.sample_id},
          {"task", DistillTaskName(e.task)},
          {"system_text", e.system_text},
          {"prompt_text", e.prompt_text},
          {"trace", TraceToJson(e.trace)},
          {"teacher_model", e.teacher_model},
          {"validation",
           {{"status", e.validation.accepted ? "accepted" : "rejected"},
            {"reason", e.validation.reason}}},
          {"doc_ids", e.doc_ids},
          {"attempts", e.attempts},
          {"messages", std::move(messages)}};
}

absl::StatusOr<DistilledExample> ExampleFromJson(const json& j) {
  try {
    DistilledExample e;
    e.sample_id = j.at("sample_id").get<std::string>();
    FORGE_ASSIGN_OR_RETURN(e.task, ParseDistillTask(j.at("task").get<std::string>()));
    e.system_text = j.value("system_text", std::string());
    e.prompt_text = j.at("prompt_text").get<std::string>();
    FORGE_ASSIGN_OR_RETURN(e.trace, TraceFromJson(j.at("trace")));
    e.teacher_model = j.value("teacher_model", std::string());
    const json& v = j.at("validation");
    e.validation.accepted = v.value("status", std::string()) == "accepted";
    e.validation.reason = v.value("reason", std::string());
    e.doc_ids = j.value("doc_ids", std::vector<std::string>());
    e.attempts = j.value("attempts", 1);
    return e;
  } catch (const json::exception& ex) {
    return absl::InvalidArgumentError(StrCat("bad distilled example: ", ex.what()));
  }
}

std::string FindLeakage(std::string_view student_prompt, const GuidanceBundle& bundle) {
  auto leaks = [&](std::string_view text) {
    std::string_view trimmed = StripWhitespace(text);
    return !trimmed.empty() && Contains(student_prompt, trimmed);
  };
  for (const docindex::DocFragment& d : bundle.doc_fragments) {
    if (leaks(d.body)) return StrCat("doc:", d.chapter_id);
  }
  if (bundle.benchmark_answer && leaks(*bundle.benchmark_answer)) return "benchmark";
  if (leaks(bundle.feature_catalog)) return "feature-catalog";
  return "";
}

json DistillConfigToJson(const DistillConfig& c) {
  return {{"teacher_model", c.teacher_model},
          {"temperature", c.temperature},
          {"max_output_tokens", c.max_output_tokens},
          {"parallelism", c.parallelism},
          {"retry_rejected", c.retry_rejected},
          {"max_docs", c.max_docs},
          {"benchmark_overlap_threshold", c.validator.benchmark_overlap_threshold}};
}

absl::StatusOr<DistillConfig> DistillConfigFromJson(const json& j, DistillConfig c) {
  if (!j.is_object()) return absl::InvalidArgumentError("distill config must be an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const json& v = it.value();
      if (k == "teacher_model") c.teacher_model = v.get<std::string>();
      else if (k == "temperature") c.temperature = v.get<double>();
      else if (k == "max_output_tokens") c.max_output_tokens = v.get<int>();
      else if (k == "parallelism") c.parallelism = v.get<int>();
      else if (k == "retry_rejected") c.retry_rejected = v.get<int>();
      else if (k == "max_docs") c.max_docs = v.get<size_t>();
      else if (k == "benchmark_overlap_threshold") c.validator.benchmark_overlap_threshold = v.get<double>();
      else return absl::InvalidArgumentError(StrCat("unknown distill key '", k, "'"));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad distill config: ", e.what()));
  }
  if (c.max_docs < 1) return absl::InvalidArgumentError("distill max_docs must be >= 1");
  if (c.retry_rejected < 0) return absl::InvalidArgumentError("retry_rejected must be >= 0");
  return c;
}

absl::StatusOr<PromptPair> Distiller::BuildPrompts(const corpus::CodeSample& sample,
                                                   const GuidanceBundle& bundle) const {
  FORGE_RETURN_IF_ERROR(ValidateBundle(bundle));
  if (bundle.task == DistillTask::kSpecToChisel) {
    return BuildS2CPrompt(sample, bundle.doc_fragments, bundle.benchmark_answer.value_or(""),
                          templates_);
  }
  return BuildD2CPrompt(sample, bundle.feature_catalog, templates_);
}

absl::StatusOr<DistilledExample> Distiller::Synthesize(const corpus::CodeSample& sample,
                                                       const GuidanceBundle& bundle) {
  FORGE_ASSIGN_OR_RETURN(PromptPair prompts, BuildPrompts(sample, bundle));
  DistilledExample example;
  example.sample_id = sample.id;
  example.task = bundle.task;
  example.system_text = templates_.student_system;
  example.prompt_text = prompts.student;
  example.teacher_model = config_.teacher_model;
  for (const docindex::DocFragment& d : bundle.doc_fragments) example.doc_ids.push_back(d.chapter_id);

  if (std::string leak = FindLeakage(prompts.student, bundle); !leak.empty()) {
    example.validation = Validation::Reject(StrCat("leakage:", leak));
    example.attempts = 0;
    return example;
  }

  for (int attempt = 0; attempt <= config_.retry_rejected; ++attempt) {
    llm::ChatRequest request =
        llm::MakeRequest(config_.teacher_model, "", prompts.teacher, config_.temperature,
                         config_.max_output_tokens);
    // The first attempt carries no seed so warm caches replay it exactly.
    if (attempt > 0) request.seed_hint = attempt;
    example.attempts = attempt + 1;
    absl::StatusOr<llm::ChatResponse> response = teacher_.Complete(request);
    if (!response.ok()) {
      example.trace = ReasoningTrace();
      example.validation = Validation::Reject("transport");
      continue;
    }
    absl::StatusOr<ReasoningTrace> trace = ParseTeacherOutput(response->content);
    if (!trace.ok()) {
      example.trace = ReasoningTrace();
      example.validation = Validation::Reject("parse");
      continue;
    }
    example.trace = *std::move(trace);
    example.validation = ValidateTrace(example.trace, bundle, config_.validator);
    if (example.validation.accepted) break;
  }
  return example;
}

std::vector<absl::StatusOr<DistilledExample>> Distiller::SynthesizeAll(
    const std::vector<corpus::CodeSample>& samples, const std::vector<GuidanceBundle>& bundles) {
  std::vector<absl::StatusOr<DistilledExample>> out(samples.size(),
                                                    absl::UnknownError("not run"));
  if (bundles.size() != samples.size()) {
    for (auto& slot : out) slot = absl::InvalidArgumentError("one guidance bundle per sample");
    return out;
  }
  ParallelFor(samples.size(), config_.parallelism,
              [&](size_t i) { out[i] = Synthesize(samples[i], bundles[i]); });
  return out;
}

}  // namespace forge::distill
