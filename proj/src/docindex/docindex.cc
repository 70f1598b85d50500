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

#include "forge/docindex/docindex.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>

#include "absl/strings/ascii.h"
#include "forge/common/files.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"
#include "forge/common/text.h"

namespace forge::docindex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<long> ParseComponents(std::string_view id) {
  std::vector<long> out;
  for (std::string_view part : SplitString(id, '.')) {
    long value = 0;
    std::from_chars(part.data(), part.data() + part.size(), value);
    out.push_back(value);
  }
  return out;
}

}  // namespace

bool ChapterIdLess::operator()(std::string_view a, std::string_view b) const {
  std::vector<long> ca = ParseComponents(a);
  std::vector<long> cb = ParseComponents(b);
  if (ca != cb) return ca < cb;
  return a < b;
}

bool IsChapterId(std::string_view id) {
  if (id.empty()) return false;
  for (std::string_view part : SplitString(id, '.')) {
    if (part.empty()) return false;
    for (char c : part) {
      if (!absl::ascii_isdigit(static_cast<unsigned char>(c))) return false;
    }
  }
  return true;
}

json FragmentToJson(const DocFragment& f) {
  return {{"chapter_id", f.chapter_id},
          {"title", f.title},
          {"summary", f.summary},
          {"body", f.body},
          {"source", f.source}};
}

absl::StatusOr<DocFragment> FragmentFromJson(const json& j) {
  try {
    DocFragment f;
    f.chapter_id = j.at("chapter_id").get<std::string>();
    f.title = j.value("title", std::string());
    f.summary = j.value("summary", std::string());
    f.body = j.value("body", std::string());
    f.source = j.value("source", std::string());
    return f;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad fragment: ", e.what()));
  }
}

absl::StatusOr<DocIndex> DocIndex::FromFragments(std::vector<DocFragment> fragments) {
  DocIndex index;
  for (DocFragment& f : fragments) {
    if (!IsChapterId(f.chapter_id)) {
      return absl::InvalidArgumentError(StrCat("malformed chapter id '", f.chapter_id, "'"));
    }
    if (!StripWhitespace(f.body).empty() && f.summary.empty()) {
      return absl::InvalidArgumentError(
          StrCat("fragment ", f.chapter_id, " has a body but no summary"));
    }
    std::string id = f.chapter_id;
    if (!index.fragments_.emplace(id, std::move(f)).second) {
      return absl::InvalidArgumentError(StrCat("duplicate chapter id '", id, "'"));
    }
  }
  for (const auto& [id, f] : index.fragments_) {
    StrAppend(&index.index_document_, "[", id, "] ", f.title, "\n");
    if (!f.summary.empty()) StrAppend(&index.index_document_, "    ", f.summary, "\n");
  }
  return index;
}

absl::StatusOr<DocIndex> DocIndex::Load(const fs::path& path) {
  FORGE_ASSIGN_OR_RETURN(std::vector<json> records, ReadJsonl(path));
  std::vector<DocFragment> fragments;
  for (const json& r : records) {
    FORGE_ASSIGN_OR_RETURN(DocFragment f, FragmentFromJson(r));
    fragments.push_back(std::move(f));
  }
  return FromFragments(std::move(fragments));
}

const DocFragment* DocIndex::Find(std::string_view chapter_id) const {
  auto it = fragments_.find(chapter_id);
  return it == fragments_.end() ? nullptr : &it->second;
}

std::vector<json> DocIndex::ToJsonl() const {
  std::vector<json> out;
  for (const auto& [id, f] : fragments_) out.push_back(FragmentToJson(f));
  return out;
}

namespace {

struct Heading {
  int level;
  std::string title;
};

// ATX headings only: 1-6 '#' followed by a space (or end of line).
std::optional<Heading> ParseHeading(std::string_view line) {
  std::string_view s = StripLeadingWhitespace(line);
  if (line.size() - s.size() > 3) return std::nullopt;
  int level = 0;
  while (level < static_cast<int>(s.size()) && s[level] == '#') ++level;
  if (level == 0 || level > 6) return std::nullopt;
  if (level < static_cast<int>(s.size()) && s[level] != ' ' && s[level] != '\t') {
    return std::nullopt;
  }
  std::string_view title = StripWhitespace(s.substr(level));
  while (!title.empty() && title.back() == '#') title.remove_suffix(1);
  return Heading{level, std::string(StripWhitespace(title))};
}

bool IsFence(std::string_view line) {
  std::string_view s = StripLeadingWhitespace(line);
  return s.starts_with("```") || s.starts_with("~~~");
}

std::string Summarize(std::string_view body, std::string_view title, size_t limit) {
  std::string paragraph;
  bool in_fence = false;
  for (std::string_view line : SplitLines(body)) {
    if (IsFence(line)) {
      in_fence = !in_fence;
      if (!paragraph.empty()) break;
      continue;
    }
    if (in_fence) continue;
    std::string_view text = StripWhitespace(line);
    if (text.empty() || ParseHeading(line)) {
      if (!paragraph.empty()) break;
      continue;
    }
    StrAppend(&paragraph, paragraph.empty() ? "" : " ", text);
  }
  if (paragraph.empty()) {
    // Code-only body: fall back to its first non-empty line, then the title.
    for (std::string_view line : SplitLines(body)) {
      std::string_view text = StripWhitespace(line);
      if (!text.empty() && !IsFence(line)) {
        paragraph = std::string(text);
        break;
      }
    }
  }
  if (paragraph.empty()) paragraph = std::string(title);
  if (paragraph.empty() && !StripWhitespace(body).empty()) paragraph = "(untitled)";
  return TruncateUtf8(CollapseWhitespace(paragraph), limit);
}

std::string JoinId(const std::vector<int>& counters, size_t depth) {
  std::string id;
  for (size_t i = 0; i < depth; ++i) StrAppend(&id, i == 0 ? "" : ".", counters[i]);
  return id;
}

}  // namespace

std::vector<DocFragment> SplitMarkdown(std::string_view markdown, int top_counter,
                                       std::string_view fallback_title,
                                       const SplitConfig& config) {
  std::vector<std::string_view> lines = SplitLines(markdown);
  struct Split {
    size_t line;
    Heading heading;
  };
  std::vector<Split> splits;
  int min_level = 7;
  bool in_fence = false;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (IsFence(lines[i])) {
      in_fence = !in_fence;
      continue;
    }
    if (in_fence) continue;
    if (std::optional<Heading> h = ParseHeading(lines[i])) {
      splits.push_back({i, *h});
      min_level = std::min(min_level, h->level);
    }
  }
  // Relative depth: the document's outermost heading level is depth 1.
  std::erase_if(splits, [&](const Split& s) { return s.heading.level - min_level + 1 > config.max_depth; });

  auto body_of = [&](size_t from, size_t to) {
    std::string body;
    for (size_t i = from; i < to; ++i) StrAppend(&body, lines[i], "\n");
    std::string_view trimmed = body;
    while (trimmed.starts_with("\n")) trimmed.remove_prefix(1);
    return std::string(StripTrailingWhitespace(trimmed)) + (trimmed.empty() ? "" : "\n");
  };

  std::vector<DocFragment> out;
  if (splits.empty()) {
    DocFragment f;
    f.chapter_id = std::to_string(top_counter);
    f.title = std::string(fallback_title);
    f.body = body_of(0, lines.size());
    f.summary = Summarize(f.body, f.title, config.summary_chars);
    out.push_back(std::move(f));
    return out;
  }

  std::vector<int> counters(static_cast<size_t>(config.max_depth), 0);
  counters[0] = top_counter - 1;
  std::string preamble = body_of(0, splits.front().line);
  for (size_t s = 0; s < splits.size(); ++s) {
    const Split& split = splits[s];
    size_t depth = static_cast<size_t>(split.heading.level - min_level + 1);
    ++counters[depth - 1];
    for (size_t d = depth; d < counters.size(); ++d) counters[d] = 0;
    // A second outermost heading inside one file still opens a new chapter.
    DocFragment f;
    f.chapter_id = JoinId(counters, depth);
    f.title = split.heading.title.empty() ? std::string(fallback_title) : split.heading.title;
    size_t end = s + 1 < splits.size() ? splits[s + 1].line : lines.size();
    f.body = body_of(split.line + 1, end);
    if (s == 0 && !preamble.empty()) f.body = preamble + "\n" + f.body;
    f.summary = Summarize(f.body, f.title, config.summary_chars);
    out.push_back(std::move(f));
  }
  return out;
}

absl::StatusOr<DocIndex> BuildIndex(const fs::path& doc_root, const SplitConfig& config) {
  if (config.max_depth < 1) return absl::InvalidArgumentError("max_depth must be >= 1");
  std::error_code ec;
  if (!fs::exists(doc_root, ec)) {
    return absl::NotFoundError(StrCat("documentation root not found: ", doc_root.string()));
  }
  std::vector<fs::path> files;
  if (fs::is_directory(doc_root, ec)) {
    for (const fs::directory_entry& e : fs::recursive_directory_iterator(doc_root, ec)) {
      std::string ext = ToLower(e.path().extension().string());
      if (e.is_regular_file() && (ext == ".md" || ext == ".markdown")) files.push_back(e.path());
    }
  } else {
    files.push_back(doc_root);
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) return absl::InvalidArgumentError("empty documentation corpus");

  std::vector<DocFragment> fragments;
  int top = 0;
  for (const fs::path& file : files) {
    FORGE_ASSIGN_OR_RETURN(std::string text, ReadFile(file));
    std::string rel = fs::is_directory(doc_root, ec)
                          ? fs::relative(file, doc_root, ec).generic_string()
                          : file.filename().string();
    std::vector<DocFragment> parts =
        SplitMarkdown(text, top + 1, file.stem().string(), config);
    for (DocFragment& f : parts) {
      f.source = rel;
      top = std::max(top, static_cast<int>(ParseComponents(f.chapter_id).front()));
      fragments.push_back(std::move(f));
    }
  }
  return DocIndex::FromFragments(std::move(fragments));
}

std::vector<AnnotationMatch> ExtractMatches(std::string_view sample_id,
                                            std::string_view annotated_code,
                                            const DocIndex& index) {
  constexpr std::string_view kMarker = "[doc:";
  std::vector<AnnotationMatch> out;
  std::vector<std::string_view> lines = SplitLines(annotated_code);
  for (size_t i = 0; i < lines.size(); ++i) {
    size_t comment = lines[i].find("//");
    if (comment == std::string_view::npos) continue;
    std::string_view rest = lines[i].substr(comment + 2);
    for (size_t pos = rest.find(kMarker); pos != std::string_view::npos;
         pos = rest.find(kMarker, pos + 1)) {
      size_t start = pos + kMarker.size();
      size_t close = rest.find(']', start);
      if (close == std::string_view::npos) break;
      std::string_view id = StripWhitespace(rest.substr(start, close - start));
      if (!IsChapterId(id)) continue;
      AnnotationMatch m;
      m.sample_id = std::string(sample_id);
      m.line_no = i + 1;
      m.chapter_id = std::string(id);
      m.resolved = index.Find(id) != nullptr;
      out.push_back(std::move(m));
    }
  }
  return out;
}

const char kDocAnnotationInstructions[] =
    "You are reviewing Chisel code against the official Chisel documentation. "
    "The documentation index below lists every citable fragment as "
    "[chapter id] title followed by a summary.\n"
    "Return the code unchanged, except that every line which uses a language "
    "feature or API described in the documentation gets a trailing comment of "
    "the form `// [doc:<chapter id>]` naming the most relevant fragment. Only "
    "cite chapter ids that appear in the index.\n\n"
    "Documentation index:\n";

absl::StatusOr<MatchResult> AnnotateAndMatch(const corpus::CodeSample& sample,
                                             const DocIndex& index,
                                             llm::AnnotationClient& annotator) {
  if (index.empty()) return absl::FailedPreconditionError("documentation index is empty");
  std::string instructions = StrCat(kDocAnnotationInstructions, index.index_document());
  absl::StatusOr<std::string> annotated = annotator.Annotate(instructions, sample.source_code);
  MatchResult result;
  if (!annotated.ok() || StripWhitespace(*annotated).empty()) {
    spdlog::warn("doc annotation failed for sample {}: {}", sample.id,
                 annotated.ok() ? std::string("empty response") : annotated.status().ToString());
    result.degraded = true;
    return result;
  }
  result.matches = ExtractMatches(sample.id, *annotated, index);
  return result;
}

std::vector<DocFragment> SelectContextDocs(const std::vector<AnnotationMatch>& matches,
                                           const DocIndex& index, size_t max_docs) {
  std::map<std::string, size_t, ChapterIdLess> counts;
  for (const AnnotationMatch& m : matches) {
    if (m.resolved && index.Find(m.chapter_id) != nullptr) ++counts[m.chapter_id];
  }
  std::vector<std::pair<std::string, size_t>> ranked(counts.begin(), counts.end());
  // Stable sort keeps chapter order among equal counts.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<DocFragment> out;
  for (const auto& [id, count] : ranked) {
    if (out.size() >= max_docs) break;
    out.push_back(*index.Find(id));
  }
  return out;
}

}  // namespace forge::docindex
