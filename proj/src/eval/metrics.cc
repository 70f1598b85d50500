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

#include "forge/eval/metrics.h"

#include <algorithm>

#include "fmt/format.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"

namespace forge::eval {

using json = nlohmann::json;

absl::StatusOr<double> PassAtK(int n, int c, int k) {
  if (n < 0 || c < 0 || c > n) {
    return absl::InvalidArgumentError(StrCat("pass@k needs 0 <= c <= n, got n=", n, " c=", c));
  }
  if (k < 1 || k > n) {
    return absl::InvalidArgumentError(StrCat("pass@k needs 1 <= k <= n, got n=", n, " k=", k));
  }
  if (n - c < k) return 1.0;
  // C(n-c, k) / C(n, k) = prod_{i=n-c+1}^{n} (1 - k / i)
  double miss = 1.0;
  for (int i = n - c + 1; i <= n; ++i) miss *= 1.0 - static_cast<double>(k) / i;
  return 1.0 - miss;
}

ProblemResult Tally(const std::string& problem_id,
                    const std::vector<std::vector<StageVerdict>>& attempts,
                    bool functional_evaluated) {
  ProblemResult r;
  r.problem_id = problem_id;
  r.n = static_cast<int>(attempts.size());
  r.functional_evaluated = functional_evaluated;
  for (const auto& chain : attempts) {
    auto passed = [&](Stage s) {
      return std::any_of(chain.begin(), chain.end(), [&](const StageVerdict& v) {
        return v.stage == s && v.status == StageStatus::kPass;
      });
    };
    if (passed(Stage::kElaborate)) ++r.c_syntax;
    if (passed(Stage::kSimulate)) ++r.c_functional;
  }
  return r;
}

absl::StatusOr<EvalReport> Aggregate(const std::vector<ProblemResult>& results,
                                     const std::vector<int>& ks) {
  if (results.empty()) return absl::InvalidArgumentError("no problems to aggregate");
  if (ks.empty()) return absl::InvalidArgumentError("no k values requested");
  EvalReport report;
  report.ks = ks;
  std::sort(report.ks.begin(), report.ks.end());
  report.ks.erase(std::unique(report.ks.begin(), report.ks.end()), report.ks.end());
  report.problems = static_cast<int>(results.size());
  report.min_n = results.front().n;
  report.max_n = results.front().n;

  long long syntax = 0;
  long long total = 0;
  std::map<int, double> sums;
  for (const ProblemResult& r : results) {
    if (!(0 <= r.c_functional && r.c_functional <= r.c_syntax && r.c_syntax <= r.n)) {
      return absl::InvalidArgumentError(
          StrCat("problem '", r.problem_id, "' has inconsistent counts n=", r.n,
                 " c_syntax=", r.c_syntax, " c_functional=", r.c_functional));
    }
    for (int k : report.ks) {
      if (r.n < k) {
        return absl::InvalidArgumentError(
            StrCat("problem '", r.problem_id, "' has n=", r.n, " attempts, fewer than k=", k));
      }
    }
    syntax += r.c_syntax;
    total += r.n;
    report.min_n = std::min(report.min_n, r.n);
    report.max_n = std::max(report.max_n, r.n);
    if (!r.functional_evaluated) continue;
    ++report.functional_problems;
    for (int k : report.ks) {
      FORGE_ASSIGN_OR_RETURN(double p, PassAtK(r.n, r.c_functional, k));
      sums[k] += p;
    }
  }
  report.total_attempts = static_cast<int>(total);
  report.syn_percent = total == 0 ? 0.0 : 100.0 * static_cast<double>(syntax) / total;
  for (int k : report.ks) {
    if (report.functional_problems == 0) {
      report.pass_at_k[k] = std::nullopt;
    } else {
      report.pass_at_k[k] = sums[k] / report.functional_problems;
    }
  }
  return report;
}

std::string RenderReport(const EvalReport& report, const std::string& label) {
  std::string out;
  std::string n = report.min_n == report.max_n
                      ? StrCat(report.min_n)
                      : StrCat(report.min_n, "..", report.max_n);
  StrAppend(&out, "# Syn(%) criterion: ", report.syntax_criterion, "-pass; n=", n,
            " attempts per problem; problems=", report.problems,
            " (with testbench: ", report.functional_problems, ")\n");
  std::vector<std::string> header = {"Model"};
  std::vector<std::string> row = {label};
  for (int k : report.ks) {
    header.push_back(StrCat("P@", k));
    const std::optional<double>& p = report.pass_at_k.at(k);
    row.push_back(p ? fmt::format("{:.2f}", 100.0 * *p) : "n/a");
  }
  header.push_back("Syn(%)");
  row.push_back(fmt::format("{:.2f}", report.syn_percent));
  std::vector<size_t> width(header.size());
  for (size_t i = 0; i < header.size(); ++i) width[i] = std::max(header[i].size(), row[i].size());
  auto line = [&](const std::vector<std::string>& cells) {
    std::string l = "|";
    for (size_t i = 0; i < cells.size(); ++i) {
      StrAppend(&l, " ", cells[i], std::string(width[i] - cells[i].size(), ' '), " |");
    }
    return l + "\n";
  };
  out += line(header);
  std::string rule = "|";
  for (size_t w : width) StrAppend(&rule, std::string(w + 2, '-'), "|");
  out += rule + "\n";
  out += line(row);
  return out;
}

json ReportToJson(const EvalReport& report) {
  json pk = json::object();
  for (const auto& [k, p] : report.pass_at_k) {
    pk[StrCat("P@", k)] = p ? json(*p) : json(nullptr);
  }
  return {{"pass_at_k", pk},
          {"syn_percent", report.syn_percent},
          {"syntax_criterion", report.syntax_criterion},
          {"problems", report.problems},
          {"functional_problems", report.functional_problems},
          {"total_attempts", report.total_attempts},
          {"min_n", report.min_n},
          {"max_n", report.max_n},
          {"ks", report.ks}};
}

}  // namespace forge::eval
