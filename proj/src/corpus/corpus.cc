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

#include "forge/corpus/corpus.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <set>
#include <unordered_set>

#include "absl/strings/ascii.h"
#include "forge/common/strings.h"
#include "forge/common/files.h"
#include "forge/common/hash.h"
#include "forge/common/parallel.h"
#include "forge/common/status_macros.h"
#include "forge/common/text.h"

namespace forge::corpus {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view LanguageName(Language language) {
  switch (language) {
    case Language::kChisel:
      return "chisel";
    case Language::kVerilog:
      return "verilog";
    case Language::kOther:
      return "other";
  }
  return "other";
}

absl::StatusOr<Language> ParseLanguage(std::string_view name) {
  std::string lower = ToLower(name);
  if (lower == "chisel" || lower == "scala") return Language::kChisel;
  if (lower == "verilog" || lower == "systemverilog" || lower == "sv") return Language::kVerilog;
  if (lower == "other") return Language::kOther;
  return absl::InvalidArgumentError(StrCat("unknown language '", name, "'"));
}

namespace {

std::string Extension(std::string_view path) {
  return ToLower(fs::path(std::string(path)).extension().string());
}

bool MentionsChisel(std::string_view content) {
  return Contains(content, "chisel3") || Contains(content, "Chisel");
}

bool HasModuleKeyword(std::string_view content) {
  size_t pos = 0;
  while ((pos = content.find("module", pos)) != std::string_view::npos) {
    bool left_ok = pos == 0 || !(absl::ascii_isalnum(content[pos - 1]) || content[pos - 1] == '_');
    size_t end = pos + 6;
    bool right_ok = end >= content.size() ||
                    !(absl::ascii_isalnum(content[end]) || content[end] == '_');
    if (left_ok && right_ok) return true;
    pos = end;
  }
  return false;
}

}  // namespace

bool HasLanguageExtension(std::string_view path, Language language) {
  std::string ext = Extension(path);
  switch (language) {
    case Language::kChisel:
      return ext == ".scala";
    case Language::kVerilog:
      return ext == ".v" || ext == ".sv" || ext == ".vh" || ext == ".svh";
    case Language::kOther:
      return !HasLanguageExtension(path, Language::kChisel) &&
             !HasLanguageExtension(path, Language::kVerilog);
  }
  return false;
}

Language DetectLanguage(std::string_view path, std::string_view content) {
  if (HasLanguageExtension(path, Language::kChisel)) {
    return MentionsChisel(content) ? Language::kChisel : Language::kOther;
  }
  if (HasLanguageExtension(path, Language::kVerilog)) {
    return HasModuleKeyword(content) ? Language::kVerilog : Language::kOther;
  }
  return Language::kOther;
}

RawFile MakeRawFile(std::string path, std::string content) {
  RawFile file;
  file.language = DetectLanguage(path, content);
  file.byte_len = content.size();
  file.path = std::move(path);
  file.content = std::move(content);
  return file;
}

absl::StatusOr<IngestResult> Ingest(const fs::path& root, Language language) {
  std::error_code ec;
  if (!fs::exists(root, ec)) {
    return absl::NotFoundError(StrCat("corpus not found: ", root.string()));
  }
  IngestResult result;
  auto accept = [&](std::string path, std::string content) {
    if (!IsValidUtf8(content)) {
      spdlog::warn("skipping {}: not valid UTF-8", path);
      result.skipped.push_back(std::move(path));
      return;
    }
    result.files.push_back(MakeRawFile(std::move(path), std::move(content)));
  };

  if (fs::is_directory(root, ec)) {
    std::vector<fs::path> paths;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) {
      return absl::PermissionDeniedError(
          StrCat("cannot read corpus directory ", root.string(), ": ", ec.message()));
    }
    for (const fs::directory_entry& entry : it) {
      if (!entry.is_regular_file(ec)) continue;
      std::string rel = fs::relative(entry.path(), root, ec).generic_string();
      if (HasLanguageExtension(rel, language)) paths.push_back(entry.path());
    }
    for (const fs::path& path : paths) {
      std::string rel = fs::relative(path, root, ec).generic_string();
      absl::StatusOr<std::string> content = ReadFile(path);
      if (!content.ok()) {
        spdlog::warn("skipping {}: {}", rel, content.status().ToString());
        result.skipped.push_back(rel);
        continue;
      }
      accept(std::move(rel), *std::move(content));
    }
  } else {
    absl::StatusOr<std::string> text = ReadFile(root);
    if (!text.ok()) return text.status();
    FORGE_ASSIGN_OR_RETURN(std::vector<json> records, ParseJsonl(*text));
    for (const json& record : records) {
      if (!record.is_object() || !record.contains("path") || !record.contains("content")) {
        return absl::InvalidArgumentError("corpus record lacks path/content");
      }
      std::string path = record["path"].get<std::string>();
      bool match = HasLanguageExtension(path, language);
      if (record.contains("lang") && record["lang"].is_string()) {
        absl::StatusOr<Language> tagged = ParseLanguage(record["lang"].get<std::string>());
        match = tagged.ok() && *tagged == language;
      }
      if (!match) continue;
      accept(std::move(path), record["content"].get<std::string>());
    }
  }
  std::sort(result.files.begin(), result.files.end(),
            [](const RawFile& a, const RawFile& b) { return a.path < b.path; });
  std::sort(result.skipped.begin(), result.skipped.end());
  return result;
}

absl::Status ValidateFilterConfig(const FilterConfig& c) {
  if (c.min_lines >= c.max_lines) {
    return absl::InvalidArgumentError("filter: min_lines must be < max_lines");
  }
  if (c.min_tokens >= c.max_tokens) {
    return absl::InvalidArgumentError("filter: min_tokens must be < max_tokens");
  }
  for (const std::string& banned : c.banned_substrings) {
    if (banned.empty()) return absl::InvalidArgumentError("filter: empty banned substring");
  }
  if (c.threads < 1) return absl::InvalidArgumentError("filter: threads must be >= 1");
  return absl::OkStatus();
}

absl::StatusOr<FilterConfig> FilterConfigFromJson(const json& j, FilterConfig c) {
  if (!j.is_object()) return absl::InvalidArgumentError("filter config must be an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const json& v = it.value();
      if (k == "banned_substrings") c.banned_substrings = v.get<std::vector<std::string>>();
      else if (k == "min_lines") c.min_lines = v.get<size_t>();
      else if (k == "max_lines") c.max_lines = v.get<size_t>();
      else if (k == "min_tokens") c.min_tokens = v.get<size_t>();
      else if (k == "max_tokens") c.max_tokens = v.get<size_t>();
      else if (k == "dedupe") c.dedupe = v.get<bool>();
      else if (k == "require_chisel3") c.require_chisel3 = v.get<bool>();
      else if (k == "threads") c.threads = v.get<int>();
      else return absl::InvalidArgumentError(StrCat("unknown filter key '", k, "'"));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad filter config: ", e.what()));
  }
  FORGE_RETURN_IF_ERROR(ValidateFilterConfig(c));
  return c;
}

json FilterConfigToJson(const FilterConfig& c) {
  return {{"banned_substrings", c.banned_substrings},
          {"min_lines", c.min_lines},
          {"max_lines", c.max_lines},
          {"min_tokens", c.min_tokens},
          {"max_tokens", c.max_tokens},
          {"dedupe", c.dedupe},
          {"require_chisel3", c.require_chisel3},
          {"threads", c.threads}};
}

json FilterReportToJson(const FilterReport& r) {
  return {{"input", r.input},
          {"kept", r.kept},
          {"rejected",
           {{"banned", r.banned},
            {"not_chisel3", r.not_chisel3},
            {"too_short", r.too_short},
            {"too_long", r.too_long},
            {"too_few_tokens", r.too_few_tokens},
            {"too_many_tokens", r.too_many_tokens},
            {"duplicates", r.duplicates}}}};
}

bool ImportsChisel3(std::string_view content) {
  for (std::string_view line : SplitLines(content)) {
    line = StripWhitespace(line);
    if (!ConsumePrefix(&line, "import")) continue;
    if (line.empty() || !absl::ascii_isspace(line.front())) continue;
    line = StripLeadingWhitespace(line);
    if (line.starts_with("chisel3") || line.starts_with("_root_.chisel3")) {
      return true;
    }
  }
  return false;
}

namespace {

enum class Verdict {
  kKeep,
  kBanned,
  kNotChisel3,
  kTooShort,
  kTooLong,
  kTooFewTokens,
  kTooManyTokens,
};

Verdict Screen(const RawFile& file, const FilterConfig& c, const Tokenizer& tokenizer) {
  for (const std::string& banned : c.banned_substrings) {
    if (Contains(file.content, banned)) return Verdict::kBanned;
  }
  if (c.require_chisel3 && file.language == Language::kChisel &&
      !ImportsChisel3(file.content)) {
    return Verdict::kNotChisel3;
  }
  size_t lines = CountLines(file.content);
  if (lines < c.min_lines) return Verdict::kTooShort;
  if (lines > c.max_lines) return Verdict::kTooLong;
  size_t tokens = tokenizer.Count(file.content);
  if (tokens < c.min_tokens) return Verdict::kTooFewTokens;
  if (tokens > c.max_tokens) return Verdict::kTooManyTokens;
  return Verdict::kKeep;
}

}  // namespace

FilterResult Filter(const std::vector<RawFile>& files, const FilterConfig& config,
                    const Tokenizer& tokenizer) {
  std::vector<Verdict> verdicts(files.size());
  ParallelFor(files.size(), config.threads,
              [&](size_t i) { verdicts[i] = Screen(files[i], config, tokenizer); });

  FilterResult result;
  result.report.input = files.size();
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < files.size(); ++i) {
    FilterReport& r = result.report;
    switch (verdicts[i]) {
      case Verdict::kBanned: ++r.banned; continue;
      case Verdict::kNotChisel3: ++r.not_chisel3; continue;
      case Verdict::kTooShort: ++r.too_short; continue;
      case Verdict::kTooLong: ++r.too_long; continue;
      case Verdict::kTooFewTokens: ++r.too_few_tokens; continue;
      case Verdict::kTooManyTokens: ++r.too_many_tokens; continue;
      case Verdict::kKeep: break;
    }
    if (config.dedupe && !seen.insert(Sha256Hex(NormalizeLines(files[i].content))).second) {
      ++r.duplicates;
      continue;
    }
    result.kept.push_back(files[i]);
  }
  result.report.kept = result.kept.size();
  return result;
}

std::string_view TaskName(TaskKind task) {
  return task == TaskKind::kCompletion ? "completion" : "decompile";
}

absl::StatusOr<TaskKind> ParseTask(std::string_view name) {
  std::string lower = ToLower(name);
  if (lower == "completion" || lower == "s2c") return TaskKind::kCompletion;
  if (lower == "decompile" || lower == "d2c") return TaskKind::kDecompile;
  return absl::InvalidArgumentError(StrCat("unknown task '", name, "'"));
}

std::string SampleId(TaskKind task, std::string_view source_code, std::string_view spec_text) {
  return HashFields({TaskName(task), source_code, spec_text}).substr(0, 32);
}

json SampleToJson(const CodeSample& s) {
  return {{"id", s.id},
          {"task", TaskName(s.task)},
          {"source_code", s.source_code},
          {"spec_text", s.spec_text},
          {"context_text", s.context_text},
          {"provenance", s.provenance},
          {"path", s.path}};
}

absl::StatusOr<CodeSample> SampleFromJson(const json& j) {
  try {
    CodeSample s;
    FORGE_ASSIGN_OR_RETURN(s.task, ParseTask(j.at("task").get<std::string>()));
    s.source_code = j.at("source_code").get<std::string>();
    s.spec_text = j.value("spec_text", std::string());
    s.context_text = j.value("context_text", std::string());
    s.provenance = j.value("provenance", std::string());
    s.path = j.value("path", std::string());
    s.id = j.value("id", std::string());
    if (s.id.empty()) s.id = SampleId(s.task, s.source_code, s.spec_text);
    return s;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad sample record: ", e.what()));
  }
}

absl::StatusOr<std::vector<CodeSample>> ReadSamples(const fs::path& path) {
  FORGE_ASSIGN_OR_RETURN(std::vector<json> records, ReadJsonl(path));
  std::vector<CodeSample> samples;
  samples.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    absl::StatusOr<CodeSample> sample = SampleFromJson(records[i]);
    if (!sample.ok()) {
      return absl::InvalidArgumentError(
          StrCat(path.string(), ": record ", i + 1, ": ", sample.status().message()));
    }
    samples.push_back(*std::move(sample));
  }
  return samples;
}

namespace {

// Index one past the bracket closing the one opened at `open`, skipping
// string literals and comments. npos when unbalanced.
size_t MatchBracket(std::string_view code, size_t open) {
  char opener = code[open];
  char closer = opener == '(' ? ')' : opener == '{' ? '}' : ']';
  int depth = 0;
  for (size_t i = open; i < code.size(); ++i) {
    char c = code[i];
    if (c == '"') {
      for (++i; i < code.size() && code[i] != '"'; ++i) {
        if (code[i] == '\\') ++i;
      }
    } else if (c == '/' && i + 1 < code.size() && code[i + 1] == '/') {
      while (i < code.size() && code[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < code.size() && code[i + 1] == '*') {
      size_t end = code.find("*/", i + 2);
      if (end == std::string_view::npos) return std::string_view::npos;
      i = end + 1;
    } else if (c == opener) {
      ++depth;
    } else if (c == closer) {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::string MaskImplementation(std::string_view code) {
  // Last `class X ... extends Module|RawModule`.
  size_t class_pos = std::string_view::npos;
  for (size_t pos = code.find("class "); pos != std::string_view::npos;
       pos = code.find("class ", pos + 1)) {
    if (pos > 0 && (absl::ascii_isalnum(code[pos - 1]) || code[pos - 1] == '_')) continue;
    size_t brace = code.find('{', pos);
    std::string_view header = code.substr(pos, brace - pos);
    if (Contains(header, "extends Module") ||
        Contains(header, "extends RawModule")) {
      class_pos = pos;
    }
  }
  std::string_view placeholder = "  // implementation omitted\n";
  if (class_pos != std::string_view::npos) {
    size_t body_open = code.find('{', class_pos);
    if (body_open != std::string_view::npos) {
      size_t body_close = MatchBracket(code, body_open);
      if (body_close != std::string_view::npos) {
        size_t keep_until = code.find('\n', body_open);
        keep_until = keep_until == std::string_view::npos || keep_until > body_close
                         ? body_open + 1
                         : keep_until + 1;
        size_t io = code.find("IO(", body_open);
        if (io != std::string_view::npos && io < body_close) {
          size_t io_end = MatchBracket(code, io + 2);
          if (io_end != std::string_view::npos && io_end < body_close) {
            size_t eol = code.find('\n', io_end);
            keep_until = eol == std::string_view::npos ? io_end : eol + 1;
          }
        }
        return StrCat(code.substr(0, keep_until), "\n", placeholder, "}\n");
      }
    }
  }
  std::vector<std::string_view> lines = SplitLines(code);
  std::string out;
  for (size_t i = 0; i < (lines.size() + 1) / 2; ++i) StrAppend(&out, lines[i], "\n");
  StrAppend(&out, placeholder);
  return out;
}

const char kSpecAnnotationInstructions[] =
    "You are an experienced Chisel hardware engineer. Read the Chisel source "
    "below and write a detailed natural-language design specification for it: "
    "purpose, parameters, every IO port with width and direction, and the "
    "cycle-level behaviour. Describe the design, do not reproduce the code. "
    "Reply with the specification text only.";

absl::StatusOr<CodeSample> BaseSampleBuilder::Build(const RawFile& file, TaskKind task) {
  CodeSample sample;
  sample.task = task;
  sample.provenance = provenance_;
  sample.path = file.path;
  sample.source_code = file.content;
  if (task == TaskKind::kDecompile) {
    if (file.language != Language::kVerilog) {
      return absl::InvalidArgumentError(
          StrCat(file.path, ": decompile samples need Verilog sources"));
    }
    sample.id = SampleId(task, sample.source_code, sample.spec_text);
    return sample;
  }
  if (file.language != Language::kChisel) {
    return absl::InvalidArgumentError(
        StrCat(file.path, ": completion samples need Chisel sources"));
  }
  std::string cache_key = HashFields({TaskName(task), file.content});
  std::string spec;
  bool hit = false;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = spec_cache_.find(cache_key);
    if (it != spec_cache_.end()) {
      spec = it->second;
      hit = true;
    }
  }
  if (!hit) {
    if (annotator_ == nullptr) {
      return absl::FailedPreconditionError("completion samples need an annotator");
    }
    annotator_calls_.fetch_add(1);
    absl::StatusOr<std::string> annotated =
        annotator_->Annotate(kSpecAnnotationInstructions, file.content);
    if (!annotated.ok()) {
      return absl::UnavailableError(
          StrCat(file.path, ": annotation failed: ", annotated.status().message()));
    }
    spec = std::string(StripWhitespace(*annotated));
    if (spec.empty()) {
      return absl::UnavailableError(StrCat(file.path, ": annotator returned nothing"));
    }
    std::lock_guard<std::mutex> lock(mu_);
    spec_cache_.emplace(cache_key, spec);
  }
  sample.spec_text = std::move(spec);
  sample.context_text = MaskImplementation(file.content);
  sample.id = SampleId(task, sample.source_code, sample.spec_text);
  return sample;
}

absl::StatusOr<BaseSampleBatch> BaseSampleBuilder::BuildAll(const std::vector<RawFile>& files,
                                                            TaskKind task, int parallelism) {
  std::vector<absl::StatusOr<CodeSample>> built(files.size(), absl::UnknownError("not run"));
  ParallelFor(files.size(), parallelism, [&](size_t i) { built[i] = Build(files[i], task); });
  BaseSampleBatch batch;
  for (size_t i = 0; i < files.size(); ++i) {
    if (built[i].ok()) {
      batch.samples.push_back(*std::move(built[i]));
    } else if (absl::IsUnavailable(built[i].status())) {
      spdlog::warn("degraded sample: {}", built[i].status().message());
      batch.degraded.push_back(files[i].path);
    } else {
      return built[i].status();
    }
  }
  return batch;
}

}  // namespace forge::corpus
