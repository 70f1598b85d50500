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

#ifndef FORGE_EVAL_METRICS_H_
#define FORGE_EVAL_METRICS_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "forge/eval/harness.h"
#include "nlohmann/json.hpp"

namespace forge::eval {

// Unbiased pass@k estimate, 1 - C(n-c, k) / C(n, k), evaluated as a running
// product so no binomial is ever materialized.
absl::StatusOr<double> PassAtK(int n, int c, int k);

struct ProblemResult {
  std::string problem_id;
  int n = 0;
  int c_syntax = 0;      // attempts passing Elaborate
  int c_functional = 0;  // attempts passing Simulate
  // False when the problem had no testbench, so functional correctness was
  // never measured. Such problems count toward Syn(%) only.
  bool functional_evaluated = true;
};

// Tallies one problem's attempts from their verdict chains.
ProblemResult Tally(const std::string& problem_id,
                    const std::vector<std::vector<StageVerdict>>& attempts,
                    bool functional_evaluated);

struct EvalReport {
  std::vector<int> ks;
  // Absent when no problem had a testbench.
  std::map<int, std::optional<double>> pass_at_k;
  double syn_percent = 0;
  int problems = 0;
  int functional_problems = 0;
  int total_attempts = 0;
  int min_n = 0;
  int max_n = 0;
  std::string syntax_criterion = "elaborate";
};

absl::StatusOr<EvalReport> Aggregate(const std::vector<ProblemResult>& results,
                                     const std::vector<int>& ks);

// Text table with one row per model label: | Model | P@1 | P@5 | Syn(%) |.
// pass@k is shown as a percentage like Syn(%).
std::string RenderReport(const EvalReport& report, const std::string& label);
nlohmann::json ReportToJson(const EvalReport& report);

}  // namespace forge::eval

#endif  // FORGE_EVAL_METRICS_H_
