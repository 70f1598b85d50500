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

#include "forge/eval/completions.h"

#include <map>
#include <set>

#include "forge/common/files.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"
#include "spdlog/spdlog.h"

namespace forge::eval {

using json = nlohmann::json;

absl::StatusOr<CompletionRecord> CompletionFromJson(const json& j) {
  CompletionRecord r;
  if (!j.is_object()) return absl::InvalidArgumentError("completion record must be an object");
  try {
    r.problem_id = j.at("problem_id").get<std::string>();
    r.prompt = j.value("prompt", "");
    r.completions = j.at("completions").get<std::vector<std::string>>();
    if (j.contains("testbench") && !j["testbench"].is_null()) {
      r.testbench = j["testbench"].get<std::string>();
    }
    if (j.contains("top_module") && !j["top_module"].is_null()) {
      r.top_module = j["top_module"].get<std::string>();
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad completion record: ", e.what()));
  }
  if (r.problem_id.empty()) return absl::InvalidArgumentError("completion record lacks problem_id");
  return r;
}

json CompletionToJson(const CompletionRecord& r) {
  json j = {{"problem_id", r.problem_id}, {"prompt", r.prompt}, {"completions", r.completions}};
  if (r.testbench) j["testbench"] = *r.testbench;
  if (r.top_module) j["top_module"] = *r.top_module;
  return j;
}

absl::StatusOr<std::vector<CompletionRecord>> ReadCompletions(const std::filesystem::path& path) {
  FORGE_ASSIGN_OR_RETURN(std::vector<json> lines, ReadJsonl(path));
  std::vector<CompletionRecord> out;
  std::set<std::string> seen;
  for (size_t i = 0; i < lines.size(); ++i) {
    absl::StatusOr<CompletionRecord> r = CompletionFromJson(lines[i]);
    if (!r.ok()) {
      return absl::InvalidArgumentError(
          StrCat(path.string(), ":", i + 1, ": ", r.status().message()));
    }
    if (!seen.insert(r->problem_id).second) {
      return absl::InvalidArgumentError(
          StrCat(path.string(), ":", i + 1, ": duplicate problem_id '", r->problem_id, "'"));
    }
    out.push_back(*std::move(r));
  }
  return out;
}

JobPlan BuildJobs(const std::vector<CompletionRecord>& records, const StageTimeouts& timeouts) {
  JobPlan plan;
  for (const CompletionRecord& r : records) {
    for (size_t i = 0; i < r.completions.size(); ++i) {
      EvalJob job;
      job.problem_id = r.problem_id;
      job.attempt_index = static_cast<int>(i);
      job.chisel_code = ExtractCode(r.completions[i]);
      job.testbench = r.testbench;
      job.timeouts = timeouts;
      if (r.top_module && !r.top_module->empty()) {
        job.top_module = *r.top_module;
      } else if (absl::StatusOr<TopDetection> top = DetectTopModule(job.chisel_code); top.ok()) {
        job.top_module = top->name;
        if (top->ambiguous) {
          plan.warnings.push_back(StrCat(r.problem_id, "#", i, ": several module classes, using ",
                                         top->name, " (declared last)"));
        }
      }
      plan.jobs.push_back(std::move(job));
    }
  }
  for (const std::string& w : plan.warnings) spdlog::warn("{}", w);
  return plan;
}

json JobVerdictsToJson(const EvalJob& job, const std::vector<StageVerdict>& verdicts) {
  json v = json::array();
  for (const StageVerdict& s : verdicts) v.push_back(VerdictToJson(s));
  return {{"problem_id", job.problem_id},
          {"attempt_index", job.attempt_index},
          {"top_module", job.top_module},
          {"verdicts", v}};
}

std::vector<ProblemResult> TallyAll(const std::vector<CompletionRecord>& records,
                                    const std::vector<EvalJob>& jobs,
                                    const std::vector<std::vector<StageVerdict>>& verdicts) {
  std::map<std::string, std::vector<std::vector<StageVerdict>>> by_problem;
  for (size_t i = 0; i < jobs.size() && i < verdicts.size(); ++i) {
    by_problem[jobs[i].problem_id].push_back(verdicts[i]);
  }
  std::vector<ProblemResult> out;
  for (const CompletionRecord& r : records) {
    out.push_back(Tally(r.problem_id, by_problem[r.problem_id], r.testbench.has_value()));
  }
  return out;
}

}  // namespace forge::eval
