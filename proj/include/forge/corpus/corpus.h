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

#ifndef FORGE_CORPUS_CORPUS_H_
#define FORGE_CORPUS_CORPUS_H_

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "forge/common/tokenizer.h"
#include "forge/llm/annotator.h"
#include "nlohmann/json.hpp"

namespace forge::corpus {

enum class Language { kChisel, kVerilog, kOther };

std::string_view LanguageName(Language language);
absl::StatusOr<Language> ParseLanguage(std::string_view name);

// Extension decides the family (.scala / .v .sv .vh .svh); content decides
// whether it really is HDL. A .scala file that never mentions Chisel, or a
// Verilog-family file with no `module`, is tagged kOther.
Language DetectLanguage(std::string_view path, std::string_view content);
bool HasLanguageExtension(std::string_view path, Language language);

struct RawFile {
  std::string path;
  std::string content;
  Language language = Language::kOther;
  size_t byte_len = 0;
};

RawFile MakeRawFile(std::string path, std::string content);

struct IngestResult {
  std::vector<RawFile> files;       // sorted by path
  std::vector<std::string> skipped; // non-UTF-8 or unreadable entries
};

// `root` is either a directory tree or a JSONL dump with one
// {path, content, lang} record per line. Files are selected by the
// extension set of `language` (JSONL records also match on their `lang`).
absl::StatusOr<IngestResult> Ingest(const std::filesystem::path& root, Language language);

// Length-screening defaults are guesses; the source corpus statistics only
// bound them loosely.
struct FilterConfig {
  std::vector<std::string> banned_substrings = {"chiseltest", "scalatest"};
  size_t min_lines = 10;
  size_t max_lines = 2000;
  size_t min_tokens = 32;
  size_t max_tokens = 8192;
  bool dedupe = true;
  // Chisel files must import chisel3; legacy `Chisel._`-only files fail.
  bool require_chisel3 = true;
  int threads = 1;
};

absl::Status ValidateFilterConfig(const FilterConfig& config);
absl::StatusOr<FilterConfig> FilterConfigFromJson(const nlohmann::json& json,
                                                  FilterConfig defaults = {});
nlohmann::json FilterConfigToJson(const FilterConfig& config);

// Every input file lands in exactly one bucket: kept, or the first rule it
// fails, checked in field order below.
struct FilterReport {
  size_t input = 0;
  size_t kept = 0;
  size_t banned = 0;
  size_t not_chisel3 = 0;
  size_t too_short = 0;
  size_t too_long = 0;
  size_t too_few_tokens = 0;
  size_t too_many_tokens = 0;
  size_t duplicates = 0;

  size_t rejected() const {
    return banned + not_chisel3 + too_short + too_long + too_few_tokens +
           too_many_tokens + duplicates;
  }
  friend bool operator==(const FilterReport&, const FilterReport&) = default;
};

nlohmann::json FilterReportToJson(const FilterReport& report);

struct FilterResult {
  std::vector<RawFile> kept;
  FilterReport report;
};

bool ImportsChisel3(std::string_view content);

// Order-preserving. Per-file checks run on cfg.threads workers; the dedupe
// pass is sequential so the first occurrence in input order wins.
FilterResult Filter(const std::vector<RawFile>& files, const FilterConfig& config,
                    const Tokenizer& tokenizer = DefaultTokenizer());

enum class TaskKind { kCompletion, kDecompile };

std::string_view TaskName(TaskKind task);
absl::StatusOr<TaskKind> ParseTask(std::string_view name);

struct CodeSample {
  std::string id;
  TaskKind task = TaskKind::kCompletion;
  std::string source_code;
  std::string spec_text;
  std::string context_text;
  std::string provenance;
  std::string path;

  friend bool operator==(const CodeSample&, const CodeSample&) = default;
};

// Pure function of (task, source, spec).
std::string SampleId(TaskKind task, std::string_view source_code, std::string_view spec_text);

nlohmann::json SampleToJson(const CodeSample& sample);
absl::StatusOr<CodeSample> SampleFromJson(const nlohmann::json& json);
absl::StatusOr<std::vector<CodeSample>> ReadSamples(const std::filesystem::path& path);

// Partial version of a Chisel module handed to the student as context: the
// file up to the end of the last module's IO declaration, with the rest of
// its body replaced by a placeholder comment.
std::string MaskImplementation(std::string_view chisel_code);

struct BaseSampleBatch {
  std::vector<CodeSample> samples;
  std::vector<std::string> degraded;  // paths excluded from synthesis
};

// Turns filtered files into task samples. Completion samples ask the
// annotator for a design specification (cached per source); Decompile
// samples pass the Verilog through untouched.
class BaseSampleBuilder {
 public:
  BaseSampleBuilder(llm::AnnotationClient* annotator, std::string provenance)
      : annotator_(annotator), provenance_(std::move(provenance)) {}

  // A failed or empty annotation yields kUnavailable (a degraded sample).
  // Supplying a file in the wrong language for the task is kInvalidArgument.
  absl::StatusOr<CodeSample> Build(const RawFile& file, TaskKind task);

  absl::StatusOr<BaseSampleBatch> BuildAll(const std::vector<RawFile>& files,
                                           TaskKind task, int parallelism);

  int64_t annotator_calls() const { return annotator_calls_.load(); }

 private:
  llm::AnnotationClient* annotator_;
  std::string provenance_;
  std::mutex mu_;
  std::map<std::string, std::string> spec_cache_;
  std::atomic<int64_t> annotator_calls_{0};
};

extern const char kSpecAnnotationInstructions[];

}  // namespace forge::corpus

#endif  // FORGE_CORPUS_CORPUS_H_
