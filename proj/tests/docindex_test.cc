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

#include <random>
#include <set>

#include "forge/common/strings.h"
#include "forge/docindex/docindex.h"
#include "forge/llm/annotator.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace forge::docindex {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

std::vector<std::string> Ids(const std::vector<DocFragment>& fragments) {
  std::vector<std::string> out;
  for (const DocFragment& f : fragments) out.push_back(f.chapter_id);
  return out;
}

std::vector<std::string> Ids(const DocIndex& index) {
  std::vector<std::string> out;
  for (const auto& [id, f] : index.fragments()) out.push_back(id);
  return out;
}

DocFragment Frag(std::string id, std::string body = "text") {
  DocFragment f;
  f.chapter_id = std::move(id);
  f.title = StrCat("T", f.chapter_id);
  f.body = body;
  f.summary = body;
  return f;
}

TEST(ChapterIdTest, NumericOrdering) {
  ChapterIdLess less;
  EXPECT_TRUE(less("1.9", "1.10"));
  EXPECT_TRUE(less("1.99", "2"));
  EXPECT_TRUE(less("1", "1.1"));
  EXPECT_FALSE(less("2", "2"));
  EXPECT_TRUE(IsChapterId("3.2.1"));
  EXPECT_FALSE(IsChapterId("3..1"));
  EXPECT_FALSE(IsChapterId(""));
  EXPECT_FALSE(IsChapterId("a.1"));
}

TEST(SplitTest, HeadingCounters) {
  std::vector<DocFragment> f = SplitMarkdown(
      "# Top\nintro para\n\n## First\nbody one\n\n## Second\nbody two\n", 1, "x", {});
  EXPECT_THAT(Ids(f), ElementsAre("1", "1.1", "1.2"));
  EXPECT_EQ(f[1].title, "First");
  EXPECT_THAT(f[1].body, HasSubstr("body one"));
  EXPECT_EQ(f[2].summary, "body two");
}

TEST(SplitTest, NoHeadingsIsOneFragment) {
  std::vector<DocFragment> f = SplitMarkdown("just prose\nmore prose\n", 1, "notes", {});
  ASSERT_EQ(f.size(), 1u);
  EXPECT_EQ(f[0].chapter_id, "1");
  EXPECT_EQ(f[0].title, "notes");
  EXPECT_THAT(f[0].body, HasSubstr("more prose"));
}

TEST(SplitTest, DeepHeadingsStayInParent) {
  SplitConfig cfg;
  cfg.max_depth = 2;
  std::vector<DocFragment> f =
      SplitMarkdown("# A\n## B\n### C\ndeep text\n## D\n", 1, "x", cfg);
  EXPECT_THAT(Ids(f), ElementsAre("1", "1.1", "1.2"));
  EXPECT_THAT(f[1].body, HasSubstr("deep text"));
}

TEST(SplitTest, FencedHashIsNotHeading) {
  std::vector<DocFragment> f =
      SplitMarkdown("# A\n```\n# not a heading\n```\n## B\n", 1, "x", {});
  EXPECT_THAT(Ids(f), ElementsAre("1", "1.1"));
}

TEST(SplitTest, SummaryTruncatedAndNonEmpty) {
  SplitConfig cfg;
  cfg.summary_chars = 20;
  std::string para(100, 'w');
  std::vector<DocFragment> f = SplitMarkdown(StrCat("# A\n", para, "\n"), 1, "x", cfg);
  ASSERT_EQ(f.size(), 1u);
  EXPECT_FALSE(f[0].summary.empty());
  EXPECT_LE(f[0].summary.size(), 20u);
}

TEST(BuildIndexTest, SecondFileGetsNextChapter) {
  testing::TempDir dir;
  testing::WriteText(dir / "a.md", "# Alpha\nfirst\n## Sub\nsub body\n");
  testing::WriteText(dir / "b.md", "# Beta\nsecond\n");
  testing::WriteText(dir / "skip.txt", "# not markdown\n");
  absl::StatusOr<DocIndex> index = BuildIndex(dir.path());
  FORGE_ASSERT_OK(index);
  EXPECT_THAT(Ids(*index), ElementsAre("1", "1.1", "2"));
  EXPECT_EQ(index->Find("2")->title, "Beta");
  EXPECT_EQ(index->Find("3"), nullptr);
}

TEST(BuildIndexTest, EmptyCorpusIsError) {
  testing::TempDir dir;
  absl::Status st = BuildIndex(dir.path()).status();
  EXPECT_FALSE(st.ok());
  EXPECT_THAT(std::string(st.message()), HasSubstr("empty documentation corpus"));
}

TEST(BuildIndexTest, IndexDocumentListsEachFragmentOnceInOrder) {
  std::vector<DocFragment> frags;
  for (const char* id : {"2", "1.10", "1", "1.9"}) frags.push_back(Frag(id));
  absl::StatusOr<DocIndex> index = DocIndex::FromFragments(frags);
  FORGE_ASSERT_OK(index);
  const std::string& doc = index->index_document();
  size_t last = 0;
  for (const char* id : {"1", "1.9", "1.10", "2"}) {
    size_t pos = doc.find(StrCat("[", id, "]"));
    ASSERT_NE(pos, std::string::npos) << id << "\n" << doc;
    EXPECT_GE(pos, last);
    EXPECT_EQ(doc.find(StrCat("[", id, "]"), pos + 1), std::string::npos);
    last = pos;
  }
}

TEST(BuildIndexTest, DuplicateIdsRejectedAndJsonlRoundTrip) {
  EXPECT_FALSE(DocIndex::FromFragments({Frag("1"), Frag("1")}).ok());
  absl::StatusOr<DocIndex> index = DocIndex::FromFragments({Frag("1"), Frag("1.1", "b")});
  FORGE_ASSERT_OK(index);
  testing::TempDir dir;
  std::string text;
  for (const nlohmann::json& j : index->ToJsonl()) StrAppend(&text, j.dump(), "\n");
  testing::WriteText(dir / "idx.jsonl", text);
  absl::StatusOr<DocIndex> back = DocIndex::Load(dir / "idx.jsonl");
  FORGE_ASSERT_OK(back);
  EXPECT_EQ(*back->Find("1.1"), *index->Find("1.1"));
  EXPECT_EQ(back->index_document(), index->index_document());
}

// Random heading trees always produce unique, ordered ids.
TEST(BuildIndexPropertyTest, RandomTreesHaveUniqueIds) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::string md;
    int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      int level = 1 + static_cast<int>(rng() % 4);
      StrAppend(&md, std::string(level, '#'), " H", i, "\n", "para ", i, "\n\n");
    }
    std::vector<DocFragment> f = SplitMarkdown(md, 1, "x", {});
    absl::StatusOr<DocIndex> index = DocIndex::FromFragments(f);
    ASSERT_TRUE(index.ok()) << md << index.status();
    for (const DocFragment& frag : f) {
      ASSERT_TRUE(IsChapterId(frag.chapter_id)) << frag.chapter_id;
      if (!frag.body.empty()) ASSERT_FALSE(frag.summary.empty());
    }
  }
}

DocIndex SmallIndex() {
  std::vector<DocFragment> frags;
  for (const char* id : {"1", "1.1", "1.2", "1.3", "2", "2.1", "2.2", "3", "3.1", "3.2", "4", "4.1"}) {
    frags.push_back(Frag(id, StrCat("body of ", id)));
  }
  return *DocIndex::FromFragments(frags);
}

TEST(MatchTest, ExtractsMarkersInLineOrder) {
  DocIndex index = SmallIndex();
  std::string code;
  for (int i = 1; i <= 6; ++i) StrAppend(&code, "val x", i, " = 0\n");
  StrAppend(&code, "val y = Reg(UInt()) // [doc:1.2] and [doc:9.9]\n");
  std::vector<AnnotationMatch> m = ExtractMatches("s1", code, index);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], (AnnotationMatch{"s1", 7, "1.2", true}));
  EXPECT_EQ(m[1], (AnnotationMatch{"s1", 7, "9.9", false}));
  EXPECT_TRUE(ExtractMatches("s1", "val a = 1\n", index).empty());
  // A marker outside a line comment does not count.
  EXPECT_TRUE(ExtractMatches("s1", "val s = \"[doc:1]\"\n", index).empty());
}

TEST(MatchTest, AnnotatorFailureDegrades) {
  DocIndex index = SmallIndex();
  corpus::CodeSample sample;
  sample.id = "s";
  sample.source_code = "val a = 1\n";
  llm::FunctionAnnotationClient failing(
      [](std::string_view, std::string_view) -> absl::StatusOr<std::string> {
        return absl::UnavailableError("down");
      });
  absl::StatusOr<MatchResult> r = AnnotateAndMatch(sample, index, failing);
  FORGE_ASSERT_OK(r);
  EXPECT_TRUE(r->degraded);
  EXPECT_TRUE(r->matches.empty());

  std::string seen_instructions;
  std::string seen_input;
  llm::FunctionAnnotationClient echo(
      [&](std::string_view instructions, std::string_view input) -> absl::StatusOr<std::string> {
        seen_instructions = std::string(instructions);
        seen_input = std::string(input);
        return std::string("val a = 1 // [doc:2.1]\n");
      });
  r = AnnotateAndMatch(sample, index, echo);
  FORGE_ASSERT_OK(r);
  EXPECT_FALSE(r->degraded);
  EXPECT_THAT(seen_instructions, HasSubstr(index.index_document()));
  EXPECT_THAT(seen_input, HasSubstr("val a = 1"));
  ASSERT_EQ(r->matches.size(), 1u);
  EXPECT_EQ(r->matches[0].chapter_id, "2.1");
}

std::vector<AnnotationMatch> Matches(std::vector<std::string> ids, const DocIndex& index) {
  std::vector<AnnotationMatch> out;
  size_t line = 1;
  for (std::string& id : ids) {
    bool resolved = index.Find(id) != nullptr;
    out.push_back({"s", line++, std::move(id), resolved});
  }
  return out;
}

TEST(SelectTest, FrequencyThenChapterOrder) {
  DocIndex index = SmallIndex();
  std::vector<DocFragment> d =
      SelectContextDocs(Matches({"1.2", "1.1", "1.1", "1.1"}, index), index, 10);
  EXPECT_THAT(Ids(d), ElementsAre("1.1", "1.2"));
  d = SelectContextDocs(Matches({"2", "1.3", "2", "1.3", "1"}, index), index, 10);
  EXPECT_THAT(Ids(d), ElementsAre("1.3", "2", "1"));
}

TEST(SelectTest, TruncatesAndSkipsUnresolved) {
  DocIndex index = SmallIndex();
  std::vector<std::string> all = Ids(index);
  EXPECT_EQ(SelectContextDocs(Matches(all, index), index, 10).size(), 10u);
  EXPECT_TRUE(SelectContextDocs(Matches({"9", "8.1"}, index), index, 10).empty());
}

TEST(SelectPropertyTest, BoundAndRoundTrip) {
  DocIndex index = SmallIndex();
  std::vector<std::string> pool = Ids(index);
  pool.push_back("7.7");
  std::mt19937 rng(9);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::string> ids;
    int n = static_cast<int>(rng() % 25);
    for (int i = 0; i < n; ++i) ids.push_back(pool[rng() % pool.size()]);
    size_t max_docs = 1 + rng() % 12;
    std::vector<AnnotationMatch> m = Matches(ids, index);
    std::vector<DocFragment> d = SelectContextDocs(m, index, max_docs);
    ASSERT_LE(d.size(), max_docs);
    std::vector<std::string> got = Ids(d);
    std::set<std::string> distinct(got.begin(), got.end());
    ASSERT_EQ(distinct.size(), d.size());
    for (const AnnotationMatch& a : m) {
      if (a.resolved) ASSERT_EQ(index.Find(a.chapter_id)->chapter_id, a.chapter_id);
    }
  }
}

}  // namespace
}  // namespace forge::docindex
