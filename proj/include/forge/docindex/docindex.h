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

#ifndef FORGE_DOCINDEX_DOCINDEX_H_
#define FORGE_DOCINDEX_DOCINDEX_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "forge/corpus/corpus.h"
#include "forge/llm/annotator.h"
#include "nlohmann/json.hpp"

namespace forge::docindex {

// Orders dotted chapter ids numerically per component, so "1.10" sorts
// after "1.9" and "2" after "1.99".
struct ChapterIdLess {
  bool operator()(std::string_view a, std::string_view b) const;
  using is_transparent = void;
};

bool IsChapterId(std::string_view id);

struct DocFragment {
  std::string chapter_id;
  std::string title;
  std::string summary;
  std::string body;
  std::string source;  // markdown file the fragment came from

  friend bool operator==(const DocFragment&, const DocFragment&) = default;
};

nlohmann::json FragmentToJson(const DocFragment& fragment);
absl::StatusOr<DocFragment> FragmentFromJson(const nlohmann::json& json);

struct SplitConfig {
  // Headings deeper than this stay inside their parent fragment.
  int max_depth = 3;
  size_t summary_chars = 400;
};

class DocIndex {
 public:
  // Rejects duplicate chapter ids.
  static absl::StatusOr<DocIndex> FromFragments(std::vector<DocFragment> fragments);
  static absl::StatusOr<DocIndex> Load(const std::filesystem::path& jsonl);

  const DocFragment* Find(std::string_view chapter_id) const;
  bool empty() const { return fragments_.empty(); }
  size_t size() const { return fragments_.size(); }
  const std::map<std::string, DocFragment, ChapterIdLess>& fragments() const {
    return fragments_;
  }

  // One entry per fragment, in chapter-id order: id, title, summary.
  const std::string& index_document() const { return index_document_; }

  std::vector<nlohmann::json> ToJsonl() const;

 private:
  std::map<std::string, DocFragment, ChapterIdLess> fragments_;
  std::string index_document_;
};

// Splits one markdown document into fragments. `top_counter` is the
// chapter number given to the document's outermost heading level; a
// document without headings becomes a single fragment titled `fallback_title`.
std::vector<DocFragment> SplitMarkdown(std::string_view markdown, int top_counter,
                                       std::string_view fallback_title,
                                       const SplitConfig& config);

// Every .md/.markdown file under `doc_root`, in path order. Each file's top
// heading opens the next top-level chapter.
absl::StatusOr<DocIndex> BuildIndex(const std::filesystem::path& doc_root,
                                    const SplitConfig& config = {});

struct AnnotationMatch {
  std::string sample_id;
  size_t line_no = 0;  // 1-based line in the annotated code
  std::string chapter_id;
  bool resolved = false;

  friend bool operator==(const AnnotationMatch&, const AnnotationMatch&) = default;
};

// Scans annotated code for `// [doc:<chapter_id>]` markers. A comment may
// carry several markers; results are in line order, then column order.
std::vector<AnnotationMatch> ExtractMatches(std::string_view sample_id,
                                            std::string_view annotated_code,
                                            const DocIndex& index);

struct MatchResult {
  std::vector<AnnotationMatch> matches;
  bool degraded = false;
};

extern const char kDocAnnotationInstructions[];

// Gives the annotator the index document and the sample's code and asks for
// the code back with line-level documentation markers.
absl::StatusOr<MatchResult> AnnotateAndMatch(const corpus::CodeSample& sample,
                                             const DocIndex& index,
                                             llm::AnnotationClient& annotator);

// Distinct resolved fragments by descending match count, ties in chapter
// order, at most max_docs.
std::vector<DocFragment> SelectContextDocs(const std::vector<AnnotationMatch>& matches,
                                           const DocIndex& index, size_t max_docs);

}  // namespace forge::docindex

#endif  // FORGE_DOCINDEX_DOCINDEX_H_
