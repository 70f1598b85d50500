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

#ifndef FORGE_JUDGE_JUDGE_H_
#define FORGE_JUDGE_JUDGE_H_

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "forge/distill/trace.h"
#include "forge/llm/client.h"
#include "nlohmann/json.hpp"

namespace forge::judge {

using distill::DeclaredVariant;
using distill::VariantKind;

struct JudgeConfig {
  std::string judge_model;
  std::string generator_model;
  double temperature = 0.3;
  double generator_temperature = 0.0;
  int max_output_tokens = 2048;
  int repeats = 3;
  double score_min = 0;
  double score_max = 10;
  // Records whose sample stdev exceeds this are left out of every mean.
  double variance_threshold = 1.5;
  int parallelism = 4;

  absl::Status Validate() const;
};

absl::StatusOr<JudgeConfig> JudgeConfigFromJson(const nlohmann::json& j, JudgeConfig base = {});
nlohmann::json JudgeConfigToJson(const JudgeConfig& c);

// Built-in prompt texts. The rubric can be replaced per run.
std::string_view DefaultRubric();
std::string_view JudgePromptTemplate();
std::string_view BaselinePromptTemplate();

struct JudgeTask {
  std::string problem_id;
  int attempt_index = 0;
  std::string spec_text;
  std::string candidate_code;
  std::vector<DeclaredVariant> baseline_variants;
  std::string rubric;
};

struct JudgeRecord {
  std::string problem_id;
  int attempt_index = 0;
  std::vector<double> scores;
  double mean = 0;
  double stdev = 0;
  bool filtered = false;
  // Fewer than two parseable scores.
  bool unusable = false;
  // Calls that failed or returned no parseable score.
  int failed_calls = 0;
};

nlohmann::json RecordToJson(const JudgeRecord& r);
absl::StatusOr<JudgeRecord> RecordFromJson(const nlohmann::json& j);

// Fills mean, stdev (sample, n - 1), unusable and filtered from scores.
void FinalizeRecord(JudgeRecord& record, double variance_threshold);

// Variant baselines keyed by a hash of the spec. With a directory the
// entries persist across runs, so every judged model sees identical text.
class BaselineStore {
 public:
  BaselineStore() = default;
  explicit BaselineStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::optional<std::vector<DeclaredVariant>> Lookup(std::string_view spec);
  absl::Status Store(std::string_view spec, const std::vector<DeclaredVariant>& variants);

 private:
  std::optional<std::filesystem::path> PathFor(std::string_view spec) const;

  std::optional<std::filesystem::path> dir_;
  std::mutex mu_;
  std::map<std::string, std::vector<DeclaredVariant>> memory_;
};

// Parses a generator answer into exactly one variant per kind, in
// configurable, functional, structural order.
absl::StatusOr<std::vector<DeclaredVariant>> ParseBaselineVariants(std::string_view text);

absl::StatusOr<std::vector<DeclaredVariant>> GenerateBaselineVariants(
    std::string_view spec, llm::ChatClient& generator, const JudgeConfig& config,
    BaselineStore& store);

struct ParsedScore {
  double value = 0;
  bool clamped = false;
};

// Reads the last "SCORE: <number>" in a verdict and clamps it into range.
absl::StatusOr<ParsedScore> ParseScore(std::string_view verdict, double min, double max);

absl::StatusOr<std::string> BuildJudgePrompt(const JudgeTask& task, const JudgeConfig& config);

// One judge call. `repeat` becomes the request's seed hint, so repeats are
// distinct requests even behind a response cache.
absl::StatusOr<double> ScoreOnce(const JudgeTask& task, llm::ChatClient& judge,
                                 const JudgeConfig& config, int repeat = 0);

absl::StatusOr<JudgeRecord> ScoreAttempt(const JudgeTask& task, int repeats,
                                         llm::ChatClient& judge, const JudgeConfig& config);

// Scores every task with all repeats in flight together, bounded by
// config.parallelism. Output follows task order.
absl::StatusOr<std::vector<JudgeRecord>> ScoreAll(const std::vector<JudgeTask>& tasks,
                                                  llm::ChatClient& judge,
                                                  const JudgeConfig& config);

struct JudgeSummary {
  std::map<std::string, double> per_problem_mean;
  double overall_mean = 0;
  // Population variance of the per-problem means.
  double overall_variance = 0;
  int used = 0;
  int filtered = 0;
  int unusable = 0;
};

// Averages usable, unfiltered records per problem, then across problems.
// Records are ordered internally, so input order never affects the result.
absl::StatusOr<JudgeSummary> AggregateScores(const std::vector<JudgeRecord>& records);

nlohmann::json SummaryToJson(const JudgeSummary& s, const JudgeConfig& config);
std::string RenderSummary(const JudgeSummary& s, const JudgeConfig& config,
                          const std::string& label);

}  // namespace forge::judge

#endif  // FORGE_JUDGE_JUDGE_H_
