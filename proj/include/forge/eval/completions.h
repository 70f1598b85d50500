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

#ifndef FORGE_EVAL_COMPLETIONS_H_
#define FORGE_EVAL_COMPLETIONS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "forge/eval/harness.h"
#include "forge/eval/metrics.h"
#include "nlohmann/json.hpp"

namespace forge::eval {

// One line of a completions dump: a problem and the raw responses a model
// produced for it.
struct CompletionRecord {
  std::string problem_id;
  std::string prompt;
  std::vector<std::string> completions;
  std::optional<std::string> testbench;
  std::optional<std::string> top_module;
};

absl::StatusOr<CompletionRecord> CompletionFromJson(const nlohmann::json& j);
nlohmann::json CompletionToJson(const CompletionRecord& r);

// Rejects duplicate problem ids so (problem_id, attempt_index) stays unique.
absl::StatusOr<std::vector<CompletionRecord>> ReadCompletions(
    const std::filesystem::path& path);

struct JobPlan {
  std::vector<EvalJob> jobs;
  // Human-readable notes, e.g. ambiguous top-module picks.
  std::vector<std::string> warnings;
};

JobPlan BuildJobs(const std::vector<CompletionRecord>& records, const StageTimeouts& timeouts);

nlohmann::json JobVerdictsToJson(const EvalJob& job, const std::vector<StageVerdict>& verdicts);

// Groups verdict chains back per problem, in record order.
std::vector<ProblemResult> TallyAll(const std::vector<CompletionRecord>& records,
                                    const std::vector<EvalJob>& jobs,
                                    const std::vector<std::vector<StageVerdict>>& verdicts);

}  // namespace forge::eval

#endif  // FORGE_EVAL_COMPLETIONS_H_
