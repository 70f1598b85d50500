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

#include "forge/judge/judge.h"

#include <algorithm>
#include <cmath>
#include <regex>

#include "fmt/format.h"
#include "forge/common/chisel.h"
#include "forge/common/files.h"
#include "forge/common/hash.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"
#include "forge/common/template.h"
#include "forge/common/text.h"
#include "forge/distill/prompts.h"
#include "spdlog/spdlog.h"

namespace forge::judge {

namespace embedded {
extern const char k_judge_prompt[];
extern const char k_baseline_prompt[];
extern const char k_variability[];
}  // namespace embedded

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr char kJudgeSystem[] = "You are a strict, consistent reviewer of hardware designs.";
constexpr char kGeneratorSystem[] = "You are an experienced hardware architect.";

std::string_view Trimmed(const char* text) { return StripWhitespace(text); }

std::string RenderVariants(const std::vector<DeclaredVariant>& variants) {
  std::string out;
  for (const DeclaredVariant& v : variants) {
    StrAppend(&out, "- ", VariantName(v.kind), ": ", v.description, "\n");
  }
  return out;
}

json VariantsToJson(const std::vector<DeclaredVariant>& variants) {
  json arr = json::array();
  for (const DeclaredVariant& v : variants) {
    arr.push_back({{"kind", VariantName(v.kind)}, {"description", v.description}});
  }
  return arr;
}

absl::StatusOr<std::vector<DeclaredVariant>> VariantsFromJson(const json& arr) {
  std::vector<DeclaredVariant> out;
  try {
    for (const json& v : arr) {
      FORGE_ASSIGN_OR_RETURN(VariantKind kind,
                             distill::ParseVariant(v.at("kind").get<std::string>()));
      out.push_back({kind, v.at("description").get<std::string>()});
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad baseline entry: ", e.what()));
  }
  return out;
}

std::string FormatScore(double v) { return fmt::format("{:g}", v); }

}  // namespace

absl::Status JudgeConfig::Validate() const {
  if (repeats < 2) return absl::InvalidArgumentError("judge repeats must be >= 2");
  if (!(score_min < score_max)) return absl::InvalidArgumentError("score_min must be below score_max");
  if (!(variance_threshold >= 0)) {
    return absl::InvalidArgumentError("variance threshold must be non-negative");
  }
  if (parallelism < 1) return absl::InvalidArgumentError("judge parallelism must be >= 1");
  if (max_output_tokens < 1) return absl::InvalidArgumentError("max_output_tokens must be >= 1");
  return absl::OkStatus();
}

absl::StatusOr<JudgeConfig> JudgeConfigFromJson(const json& j, JudgeConfig c) {
  if (!j.is_object()) return absl::InvalidArgumentError("judge config must be an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const json& v = it.value();
      if (k == "judge_model") c.judge_model = v.get<std::string>();
      else if (k == "generator_model") c.generator_model = v.get<std::string>();
      else if (k == "temperature") c.temperature = v.get<double>();
      else if (k == "generator_temperature") c.generator_temperature = v.get<double>();
      else if (k == "max_output_tokens") c.max_output_tokens = v.get<int>();
      else if (k == "repeats") c.repeats = v.get<int>();
      else if (k == "score_min") c.score_min = v.get<double>();
      else if (k == "score_max") c.score_max = v.get<double>();
      else if (k == "variance_threshold") {
        // null means "never filter"
        c.variance_threshold = v.is_null() ? INFINITY : v.get<double>();
      }
      else if (k == "parallelism") c.parallelism = v.get<int>();
      else return absl::InvalidArgumentError(StrCat("unknown judge config key '", k, "'"));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad judge config: ", e.what()));
  }
  FORGE_RETURN_IF_ERROR(c.Validate());
  return c;
}

json JudgeConfigToJson(const JudgeConfig& c) {
  return {{"judge_model", c.judge_model},
          {"generator_model", c.generator_model},
          {"temperature", c.temperature},
          {"generator_temperature", c.generator_temperature},
          {"max_output_tokens", c.max_output_tokens},
          {"repeats", c.repeats},
          {"score_min", c.score_min},
          {"score_max", c.score_max},
          {"variance_threshold",
           std::isfinite(c.variance_threshold) ? json(c.variance_threshold) : json(nullptr)},
          {"parallelism", c.parallelism}};
}

std::string_view DefaultRubric() { return Trimmed(embedded::k_variability); }
std::string_view JudgePromptTemplate() { return Trimmed(embedded::k_judge_prompt); }
std::string_view BaselinePromptTemplate() { return Trimmed(embedded::k_baseline_prompt); }

json RecordToJson(const JudgeRecord& r) {
  return {{"problem_id", r.problem_id}, {"attempt_index", r.attempt_index},
          {"scores", r.scores},         {"mean", r.mean},
          {"stdev", r.stdev},           {"filtered", r.filtered},
          {"unusable", r.unusable},     {"failed_calls", r.failed_calls}};
}

absl::StatusOr<JudgeRecord> RecordFromJson(const json& j) {
  JudgeRecord r;
  try {
    r.problem_id = j.at("problem_id").get<std::string>();
    r.attempt_index = j.at("attempt_index").get<int>();
    r.scores = j.at("scores").get<std::vector<double>>();
    r.mean = j.value("mean", 0.0);
    r.stdev = j.value("stdev", 0.0);
    r.filtered = j.value("filtered", false);
    r.unusable = j.value("unusable", false);
    r.failed_calls = j.value("failed_calls", 0);
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad judge record: ", e.what()));
  }
  return r;
}

void FinalizeRecord(JudgeRecord& r, double threshold) {
  size_t n = r.scores.size();
  r.mean = 0;
  r.stdev = 0;
  if (n > 0) {
    double sum = 0;
    for (double s : r.scores) sum += s;
    r.mean = sum / static_cast<double>(n);
  }
  if (n > 1) {
    double ss = 0;
    for (double s : r.scores) ss += (s - r.mean) * (s - r.mean);
    r.stdev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  r.unusable = n < 2;
  r.filtered = !r.unusable && r.stdev > threshold;
}

std::optional<fs::path> BaselineStore::PathFor(std::string_view spec) const {
  if (!dir_) return std::nullopt;
  return *dir_ / StrCat(Sha256Hex(spec), ".json");
}

std::optional<std::vector<DeclaredVariant>> BaselineStore::Lookup(std::string_view spec) {
  std::string key = Sha256Hex(spec);
  std::lock_guard<std::mutex> lock(mu_);
  if (auto it = memory_.find(key); it != memory_.end()) return it->second;
  std::optional<fs::path> path = PathFor(spec);
  if (!path || !fs::exists(*path)) return std::nullopt;
  absl::StatusOr<std::string> text = ReadFile(*path);
  if (!text.ok()) return std::nullopt;
  json j = json::parse(*text, nullptr, false);
  if (j.is_discarded() || !j.contains("variants")) {
    spdlog::warn("ignoring corrupt baseline entry {}", path->string());
    return std::nullopt;
  }
  absl::StatusOr<std::vector<DeclaredVariant>> variants = VariantsFromJson(j["variants"]);
  if (!variants.ok()) {
    spdlog::warn("ignoring corrupt baseline entry {}: {}", path->string(),
                 variants.status().message());
    return std::nullopt;
  }
  memory_[key] = *variants;
  return *variants;
}

absl::Status BaselineStore::Store(std::string_view spec,
                                  const std::vector<DeclaredVariant>& variants) {
  std::string key = Sha256Hex(spec);
  std::lock_guard<std::mutex> lock(mu_);
  memory_[key] = variants;
  if (std::optional<fs::path> path = PathFor(spec)) {
    json j = {{"spec_sha256", key}, {"variants", VariantsToJson(variants)}};
    return WriteFileAtomic(*path, j.dump(2) + "\n");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<DeclaredVariant>> ParseBaselineVariants(std::string_view text) {
  std::string body;
  for (const FencedBlock& b : FindFencedBlocks(text)) {
    if (ToLower(StripWhitespace(b.info)) == "variants") body = b.body;
  }
  if (body.empty()) {
    for (std::string_view line : SplitLines(text)) {
      std::string_view s = StripWhitespace(line);
      if (s.starts_with("- ") || s.starts_with("* ")) s.remove_prefix(2);
      if (ToLower(s.substr(0, 8)) == "variant:") StrAppend(&body, s, "\n");
    }
  }
  if (body.empty()) return absl::InvalidArgumentError("no variant lines in generator output");
  FORGE_ASSIGN_OR_RETURN(std::vector<DeclaredVariant> declared,
                         distill::ParseVariantLines(body));
  std::vector<DeclaredVariant> out;
  for (VariantKind kind : distill::kAllVariantKinds) {
    int count = 0;
    for (const DeclaredVariant& v : declared) {
      if (v.kind != kind) continue;
      if (++count == 1) out.push_back(v);
    }
    if (count != 1) {
      return absl::InvalidArgumentError(StrCat("expected exactly one ", VariantName(kind),
                                               " variant, got ", count));
    }
    if (out.back().description.empty()) {
      return absl::InvalidArgumentError(StrCat(VariantName(kind), " variant has no description"));
    }
  }
  return out;
}

absl::StatusOr<std::vector<DeclaredVariant>> GenerateBaselineVariants(
    std::string_view spec, llm::ChatClient& generator, const JudgeConfig& config,
    BaselineStore& store) {
  if (StripWhitespace(spec).empty()) {
    return absl::InvalidArgumentError("cannot generate baseline variants for an empty specification");
  }
  if (std::optional<std::vector<DeclaredVariant>> cached = store.Lookup(spec)) return *cached;
  FORGE_ASSIGN_OR_RETURN(
      std::string prompt,
      RenderTemplate(BaselinePromptTemplate(),
                     {{"spec", std::string(StripWhitespace(spec))},
                      {"variant_definitions",
                       distill::PromptTemplates::Defaults().variant_definitions}}));
  llm::ChatRequest request =
      llm::MakeRequest(config.generator_model, kGeneratorSystem, std::move(prompt),
                       config.generator_temperature, config.max_output_tokens);
  absl::StatusOr<llm::ChatResponse> response = generator.Complete(request);
  if (!response.ok()) {
    return absl::Status(response.status().code(),
                        StrCat("baseline generation failed: ", response.status().message()));
  }
  absl::StatusOr<std::vector<DeclaredVariant>> variants = ParseBaselineVariants(response->content);
  if (!variants.ok()) {
    return absl::InvalidArgumentError(
        StrCat("baseline generation failed: ", variants.status().message()));
  }
  FORGE_RETURN_IF_ERROR(store.Store(spec, *variants));
  return *variants;
}

absl::StatusOr<ParsedScore> ParseScore(std::string_view verdict, double min, double max) {
  static const std::regex kScore(R"(SCORE\**\s*:\s*\**\s*([-+]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)))");
  std::string text(verdict);
  std::optional<std::string> last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kScore);
       it != std::sregex_iterator(); ++it) {
    last = (*it)[1].str();
  }
  if (!last) return absl::InvalidArgumentError("verdict has no 'SCORE: <number>' line");
  ParsedScore out;
  out.value = std::stod(*last);
  if (out.value < min || out.value > max) {
    double clamped = std::clamp(out.value, min, max);
    spdlog::warn("judge score {} outside [{}, {}], clamped to {}", *last, min, max, clamped);
    out.value = clamped;
    out.clamped = true;
  }
  return out;
}

absl::StatusOr<std::string> BuildJudgePrompt(const JudgeTask& task, const JudgeConfig& config) {
  if (StripWhitespace(task.rubric).empty()) return absl::InvalidArgumentError("rubric is empty");
  if (task.baseline_variants.empty()) {
    return absl::InvalidArgumentError(StrCat("problem '", task.problem_id, "' has no baseline variants"));
  }
  return RenderTemplate(JudgePromptTemplate(),
                        {{"rubric", std::string(StripWhitespace(task.rubric))},
                         {"spec", std::string(StripWhitespace(task.spec_text))},
                         {"variants", RenderVariants(task.baseline_variants)},
                         {"code", std::string(StripTrailingWhitespace(task.candidate_code))},
                         {"score_min", FormatScore(config.score_min)},
                         {"score_max", FormatScore(config.score_max)}});
}

namespace {

llm::ChatRequest JudgeRequest(std::string prompt, const JudgeConfig& config, int repeat) {
  llm::ChatRequest r = llm::MakeRequest(config.judge_model, kJudgeSystem, std::move(prompt),
                                        config.temperature, config.max_output_tokens);
  r.seed_hint = repeat;
  return r;
}

absl::StatusOr<double> ScoreFromResponse(const absl::StatusOr<llm::ChatResponse>& response,
                                         const JudgeConfig& config) {
  if (!response.ok()) return response.status();
  FORGE_ASSIGN_OR_RETURN(ParsedScore s,
                         ParseScore(response->content, config.score_min, config.score_max));
  return s.value;
}

}  // namespace

absl::StatusOr<double> ScoreOnce(const JudgeTask& task, llm::ChatClient& judge,
                                 const JudgeConfig& config, int repeat) {
  FORGE_ASSIGN_OR_RETURN(std::string prompt, BuildJudgePrompt(task, config));
  return ScoreFromResponse(judge.Complete(JudgeRequest(std::move(prompt), config, repeat)), config);
}

absl::StatusOr<JudgeRecord> ScoreAttempt(const JudgeTask& task, int repeats,
                                         llm::ChatClient& judge, const JudgeConfig& config) {
  JudgeConfig c = config;
  c.repeats = repeats;
  FORGE_ASSIGN_OR_RETURN(std::vector<JudgeRecord> records, ScoreAll({task}, judge, c));
  return records.front();
}

absl::StatusOr<std::vector<JudgeRecord>> ScoreAll(const std::vector<JudgeTask>& tasks,
                                                  llm::ChatClient& judge,
                                                  const JudgeConfig& config) {
  FORGE_RETURN_IF_ERROR(config.Validate());
  std::vector<llm::ChatRequest> requests;
  requests.reserve(tasks.size() * config.repeats);
  for (const JudgeTask& task : tasks) {
    FORGE_ASSIGN_OR_RETURN(std::string prompt, BuildJudgePrompt(task, config));
    for (int r = 0; r < config.repeats; ++r) requests.push_back(JudgeRequest(prompt, config, r));
  }
  std::vector<absl::StatusOr<llm::ChatResponse>> responses =
      judge.CompleteMany(requests, config.parallelism);
  std::vector<JudgeRecord> records;
  records.reserve(tasks.size());
  for (size_t t = 0; t < tasks.size(); ++t) {
    JudgeRecord rec;
    rec.problem_id = tasks[t].problem_id;
    rec.attempt_index = tasks[t].attempt_index;
    for (int r = 0; r < config.repeats; ++r) {
      absl::StatusOr<double> score = ScoreFromResponse(responses[t * config.repeats + r], config);
      if (score.ok()) {
        rec.scores.push_back(*score);
      } else {
        ++rec.failed_calls;
        spdlog::warn("judge call {}#{} repeat {} excluded: {}", rec.problem_id,
                     rec.attempt_index, r, score.status().message());
      }
    }
    FinalizeRecord(rec, config.variance_threshold);
    records.push_back(std::move(rec));
  }
  return records;
}

absl::StatusOr<JudgeSummary> AggregateScores(const std::vector<JudgeRecord>& records) {
  std::vector<const JudgeRecord*> sorted;
  sorted.reserve(records.size());
  for (const JudgeRecord& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const JudgeRecord* a, const JudgeRecord* b) {
    if (a->problem_id != b->problem_id) return a->problem_id < b->problem_id;
    if (a->attempt_index != b->attempt_index) return a->attempt_index < b->attempt_index;
    return a->mean < b->mean;
  });
  JudgeSummary s;
  std::map<std::string, std::pair<double, int>> sums;
  for (const JudgeRecord* r : sorted) {
    if (r->unusable) {
      ++s.unusable;
    } else if (r->filtered) {
      ++s.filtered;
    } else {
      ++s.used;
      auto& [sum, count] = sums[r->problem_id];
      sum += r->mean;
      ++count;
    }
  }
  if (s.used == 0) return absl::FailedPreconditionError("no usable judgments");
  double total = 0;
  for (const auto& [problem, sc] : sums) {
    double m = sc.first / sc.second;
    s.per_problem_mean[problem] = m;
    total += m;
  }
  double count = static_cast<double>(s.per_problem_mean.size());
  s.overall_mean = total / count;
  double ss = 0;
  for (const auto& [problem, m] : s.per_problem_mean) {
    ss += (m - s.overall_mean) * (m - s.overall_mean);
  }
  s.overall_variance = ss / count;
  return s;
}

json SummaryToJson(const JudgeSummary& s, const JudgeConfig& config) {
  return {{"per_problem_mean", s.per_problem_mean},
          {"overall_mean", s.overall_mean},
          {"overall_variance", s.overall_variance},
          {"counts", {{"used", s.used}, {"filtered", s.filtered}, {"unusable", s.unusable}}},
          {"config", JudgeConfigToJson(config)}};
}

std::string RenderSummary(const JudgeSummary& s, const JudgeConfig& config,
                          const std::string& label) {
  std::string threshold = std::isfinite(config.variance_threshold)
                              ? FormatScore(config.variance_threshold)
                              : std::string("inf");
  std::string out = StrCat("# Judge scale [", FormatScore(config.score_min), ", ",
                           FormatScore(config.score_max), "], repeats ", config.repeats,
                           ", filter stdev > ", threshold, "\n");
  std::vector<std::string> header = {"Model", "Mean", "Variance", "Used", "Filtered", "Unusable"};
  std::vector<std::string> row = {label,
                                  fmt::format("{:.2f}", s.overall_mean),
                                  fmt::format("{:.2f}", s.overall_variance),
                                  StrCat(s.used),
                                  StrCat(s.filtered),
                                  StrCat(s.unusable)};
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
  out += rule + "\n" + line(row);
  return out;
}

}  // namespace forge::judge
