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

#include "corpus_fixtures.h"
#include "forge/common/text.h"
#include "forge/corpus/corpus.h"
#include "forge/llm/annotator.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace forge::corpus {
namespace {

using ::forge::testing::ChiselModule;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

constexpr char kVerilogAdder[] =
    "module Adder(input [3:0] a, input [3:0] b, output [4:0] s);\n"
    "  assign s = a + b;\nendmodule\n";

TEST(IngestTest, ExtensionRulePerLanguage) {
  testing::TempDir dir;
  testing::WriteText(dir / "a.scala", ChiselModule(1, 2));
  testing::WriteText(dir / "b.v", kVerilogAdder);
  testing::WriteText(dir / "c.txt", "notes");
  absl::StatusOr<IngestResult> chisel = Ingest(dir.path(), Language::kChisel);
  FORGE_ASSERT_OK(chisel);
  ASSERT_EQ(chisel->files.size(), 1u);
  EXPECT_EQ(chisel->files[0].path, "a.scala");
  EXPECT_EQ(chisel->files[0].language, Language::kChisel);
  absl::StatusOr<IngestResult> verilog = Ingest(dir.path(), Language::kVerilog);
  FORGE_ASSERT_OK(verilog);
  ASSERT_EQ(verilog->files.size(), 1u);
  EXPECT_EQ(verilog->files[0].path, "b.v");
}

TEST(IngestTest, EmptyDirectoryAndMissingRoot) {
  testing::TempDir dir;
  absl::StatusOr<IngestResult> empty = Ingest(dir.path(), Language::kChisel);
  FORGE_ASSERT_OK(empty);
  EXPECT_TRUE(empty->files.empty());
  EXPECT_TRUE(empty->skipped.empty());
  EXPECT_EQ(Ingest(dir / "nope", Language::kChisel).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(IngestTest, LexicographicOrderAndUtf8Skip) {
  testing::TempDir dir;
  testing::WriteText(dir / "z/m.scala", ChiselModule(1, 2));
  testing::WriteText(dir / "a.scala", ChiselModule(2, 2));
  testing::WriteText(dir / "b.scala", std::string("import chisel3._\n\xff\xfe\n"));
  absl::StatusOr<IngestResult> r = Ingest(dir.path(), Language::kChisel);
  FORGE_ASSERT_OK(r);
  EXPECT_THAT(testing::PathsOf(r->files), ElementsAre("a.scala", "z/m.scala"));
  EXPECT_THAT(r->skipped, ElementsAre("b.scala"));
}

TEST(IngestTest, JsonlDump) {
  testing::TempDir dir;
  nlohmann::json a = {{"path", "x.scala"}, {"content", ChiselModule(3, 1)}, {"lang", "chisel"}};
  nlohmann::json b = {{"path", "y.v"}, {"content", kVerilogAdder}};
  testing::WriteText(dir / "dump.jsonl", StrCat(a.dump(), "\n", b.dump(), "\n"));
  absl::StatusOr<IngestResult> r = Ingest(dir / "dump.jsonl", Language::kVerilog);
  FORGE_ASSERT_OK(r);
  EXPECT_THAT(testing::PathsOf(r->files), ElementsAre("y.v"));
}

TEST(FilterTest, BannedSubstring) {
  std::vector<RawFile> files = {
      MakeRawFile("a.scala", ChiselModule(1, 12)),
      MakeRawFile("b.scala", StrCat("import chiseltest._\n", ChiselModule(2, 12))),
      MakeRawFile("c.scala", ChiselModule(3, 12))};
  FilterResult r = Filter(files, FilterConfig{});
  EXPECT_EQ(r.kept.size(), 2u);
  EXPECT_EQ(r.report.banned, 1u);
  EXPECT_EQ(r.report.input, 3u);
}

TEST(FilterTest, BannedMatchIsCaseSensitive) {
  std::vector<RawFile> files = {MakeRawFile("a.scala", StrCat("// ChiselTest\n", ChiselModule(1, 12)))};
  EXPECT_EQ(Filter(files, FilterConfig{}).kept.size(), 1u);
}

TEST(FilterTest, TooShort) {
  FilterConfig cfg;
  cfg.min_lines = 20;
  std::vector<RawFile> files = {MakeRawFile("a.scala", "import chisel3._\na\nb\nc\nd\n")};
  FilterResult r = Filter(files, cfg);
  EXPECT_TRUE(r.kept.empty());
  EXPECT_EQ(r.report.too_short, 1u);
}

TEST(FilterTest, ExactDuplicates) {
  std::string code = ChiselModule(1, 12);
  std::vector<RawFile> files = {MakeRawFile("a.scala", code), MakeRawFile("b.scala", code)};
  FilterResult r = Filter(files, FilterConfig{});
  EXPECT_THAT(testing::PathsOf(r.kept), ElementsAre("a.scala"));
  EXPECT_EQ(r.report.duplicates, 1u);
  FilterConfig no_dedupe;
  no_dedupe.dedupe = false;
  EXPECT_EQ(Filter(files, no_dedupe).kept.size(), 2u);
}

TEST(FilterTest, DuplicateAfterWhitespaceNormalization) {
  std::string code = ChiselModule(1, 12);
  std::string reindented;
  for (std::string_view line : SplitLines(code)) StrAppend(&reindented, "    ", line, "  \n");
  std::vector<RawFile> files = {MakeRawFile("a.scala", code), MakeRawFile("b.scala", reindented)};
  EXPECT_EQ(Filter(files, FilterConfig{}).report.duplicates, 1u);
}

TEST(FilterTest, LegacyChiselRejected) {
  std::vector<RawFile> files = {MakeRawFile("a.scala", ChiselModule(1, 12, /*chisel3=*/false))};
  FilterResult r = Filter(files, FilterConfig{});
  EXPECT_EQ(r.report.not_chisel3, 1u);
  FilterConfig lax;
  lax.require_chisel3 = false;
  EXPECT_EQ(Filter(files, lax).kept.size(), 1u);
}

TEST(FilterTest, ConfigValidationAndJson) {
  FilterConfig bad;
  bad.min_lines = 10;
  bad.max_lines = 10;
  EXPECT_FALSE(ValidateFilterConfig(bad).ok());
  FORGE_EXPECT_OK(ValidateFilterConfig(FilterConfig{}));
  EXPECT_FALSE(FilterConfigFromJson({{"min_line", 3}}).ok());
  absl::StatusOr<FilterConfig> c = FilterConfigFromJson({{"min_lines", 3}, {"dedupe", false}});
  FORGE_ASSERT_OK(c);
  EXPECT_EQ(c->min_lines, 3u);
  EXPECT_FALSE(c->dedupe);
  absl::StatusOr<FilterConfig> back = FilterConfigFromJson(FilterConfigToJson(*c));
  FORGE_ASSERT_OK(back);
  EXPECT_EQ(back->banned_substrings, c->banned_substrings);
}

TEST(FilterTest, SyntheticCorpusReconciles) {
  testing::SyntheticCorpus corpus = testing::MakeSyntheticCorpus(300, 40, 20, 7);
  FilterResult r = Filter(corpus.files, FilterConfig{});
  EXPECT_EQ(r.report.banned, 40u);
  EXPECT_EQ(r.report.duplicates, 20u);
  EXPECT_EQ(r.report.kept + r.report.rejected(), r.report.input);
  EXPECT_EQ(r.report.kept, 240u);
  for (const RawFile& f : r.kept) EXPECT_FALSE(corpus.banned_paths.count(f.path)) << f.path;
}

TEST(FilterPropertyTest, MatchesReferenceFilter) {
  std::mt19937 rng(11);
  testing::SpaceTokenizer tok;
  for (int i = 0; i < 400; ++i) {
    testing::FilterCase c = testing::RandomFilterCase(rng);
    FilterResult r = Filter(c.files, c.config, tok);
    ASSERT_EQ(testing::PathsOf(r.kept), testing::ReferenceFilter(c.files, c.config)) << "case " << i;
    ASSERT_EQ(r.report.kept + r.report.rejected(), r.report.input);
  }
}

TEST(FilterPropertyTest, Idempotent) {
  std::mt19937 rng(12);
  for (int i = 0; i < 400; ++i) {
    testing::FilterCase c = testing::RandomFilterCase(rng);
    FilterResult once = Filter(c.files, c.config);
    FilterResult twice = Filter(once.kept, c.config);
    ASSERT_EQ(testing::PathsOf(twice.kept), testing::PathsOf(once.kept)) << "case " << i;
    ASSERT_EQ(twice.report.rejected(), 0u);
  }
}

TEST(FilterPropertyTest, TighteningNeverGrowsKeptSet) {
  std::mt19937 rng(13);
  for (int i = 0; i < 400; ++i) {
    testing::FilterCase c = testing::RandomFilterCase(rng);
    FilterConfig tight = testing::Tighten(c.config, rng);
    std::vector<std::string> loose_kept = testing::PathsOf(Filter(c.files, c.config).kept);
    std::vector<std::string> tight_kept = testing::PathsOf(Filter(c.files, tight).kept);
    ASSERT_TRUE(std::includes(loose_kept.begin(), loose_kept.end(), tight_kept.begin(),
                              tight_kept.end()))
        << "case " << i;
  }
}

TEST(FilterPropertyTest, DeterministicAcrossThreadCounts) {
  std::mt19937 rng(14);
  for (int i = 0; i < 50; ++i) {
    testing::FilterCase c = testing::RandomFilterCase(rng);
    c.config.threads = 1;
    FilterResult base = Filter(c.files, c.config);
    for (int threads : {2, 3, 8}) {
      c.config.threads = threads;
      FilterResult r = Filter(c.files, c.config);
      ASSERT_EQ(testing::PathsOf(r.kept), testing::PathsOf(base.kept));
      ASSERT_EQ(r.report, base.report);
      ASSERT_EQ(FilterReportToJson(r.report).dump(), FilterReportToJson(base.report).dump());
    }
  }
}

TEST(SampleTest, DecompileIsVerbatim) {
  BaseSampleBuilder builder(nullptr, "corpus-v");
  absl::StatusOr<CodeSample> s = builder.Build(MakeRawFile("add.v", kVerilogAdder), TaskKind::kDecompile);
  FORGE_ASSERT_OK(s);
  EXPECT_EQ(s->task, TaskKind::kDecompile);
  EXPECT_EQ(s->source_code, kVerilogAdder);
  EXPECT_TRUE(s->spec_text.empty());
  EXPECT_EQ(s->provenance, "corpus-v");
  EXPECT_EQ(builder.Build(MakeRawFile("a.scala", ChiselModule(1, 1)), TaskKind::kDecompile)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(SampleTest, CompletionUsesAnnotatorAndCaches) {
  llm::FunctionAnnotationClient annotator(
      [](std::string_view, std::string_view) -> absl::StatusOr<std::string> {
        return std::string("4-bit counter");
      });
  BaseSampleBuilder builder(&annotator, "corpus-c");
  RawFile file = MakeRawFile("c.scala", ChiselModule(4, 3));
  absl::StatusOr<CodeSample> a = builder.Build(file, TaskKind::kCompletion);
  absl::StatusOr<CodeSample> b = builder.Build(file, TaskKind::kCompletion);
  FORGE_ASSERT_OK(a);
  FORGE_ASSERT_OK(b);
  EXPECT_EQ(a->spec_text, "4-bit counter");
  EXPECT_EQ(a->id, b->id);
  EXPECT_EQ(builder.annotator_calls(), 1);
  // Context keeps the interface and hides the body.
  EXPECT_THAT(a->context_text, HasSubstr("val io = IO(new Bundle"));
  EXPECT_THAT(a->context_text, HasSubstr("implementation omitted"));
  EXPECT_THAT(a->context_text, ::testing::Not(HasSubstr("RegNext")));
}

TEST(SampleTest, EmptyAnnotationDegrades) {
  llm::FunctionAnnotationClient annotator(
      [](std::string_view, std::string_view input) -> absl::StatusOr<std::string> {
        if (Contains(input, "Gen2")) return std::string("  ");
        return std::string("spec");
      });
  BaseSampleBuilder builder(&annotator, "p");
  std::vector<RawFile> files = {MakeRawFile("1.scala", ChiselModule(1, 2)),
                                MakeRawFile("2.scala", ChiselModule(2, 2))};
  absl::StatusOr<BaseSampleBatch> batch = builder.BuildAll(files, TaskKind::kCompletion, 2);
  FORGE_ASSERT_OK(batch);
  EXPECT_EQ(batch->samples.size(), 1u);
  EXPECT_THAT(batch->degraded, ElementsAre("2.scala"));
}

TEST(SampleTest, IdIsPureFunctionOfContent) {
  EXPECT_EQ(SampleId(TaskKind::kCompletion, "x", "y"), SampleId(TaskKind::kCompletion, "x", "y"));
  EXPECT_NE(SampleId(TaskKind::kCompletion, "x", "y"), SampleId(TaskKind::kDecompile, "x", "y"));
  EXPECT_NE(SampleId(TaskKind::kCompletion, "x", "y"), SampleId(TaskKind::kCompletion, "x", "z"));
  // Field boundaries matter.
  EXPECT_NE(SampleId(TaskKind::kCompletion, "xy", ""), SampleId(TaskKind::kCompletion, "x", "y"));
  CodeSample s;
  s.id = "abc";
  s.source_code = "code";
  absl::StatusOr<CodeSample> back = SampleFromJson(SampleToJson(s));
  FORGE_ASSERT_OK(back);
  EXPECT_EQ(*back, s);
}

}  // namespace
}  // namespace forge::corpus
