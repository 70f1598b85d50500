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
#include <atomic>
#include <cmath>
#include <map>
#include <random>

#include "forge/common/files.h"
#include "forge/common/strings.h"
#include "forge/llm/transport.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace forge::judge {
namespace {

using ::testing::HasSubstr;

llm::ClientOptions Fast() {
  llm::ClientOptions o;
  o.sleep = [](double) {};
  o.retry.max_attempts = 1;
  return o;
}

JudgeRecord Rec(std::string problem, int attempt, std::vector<double> scores,
                double threshold = 1.5) {
  JudgeRecord r;
  r.problem_id = std::move(problem);
  r.attempt_index = attempt;
  r.scores = std::move(scores);
  FinalizeRecord(r, threshold);
  return r;
}

// Independent two-level mean: group kept records by problem, average each
// group, then average the group means.
double OracleOverall(const std::vector<JudgeRecord>& records) {
  std::map<std::string, std::vector<double>> groups;
  for (const JudgeRecord& r : records) {
    if (r.unusable || r.filtered) continue;
    double m = 0;
    for (double s : r.scores) m += s;
    groups[r.problem_id].push_back(m / static_cast<double>(r.scores.size()));
  }
  double total = 0;
  for (const auto& [id, means] : groups) {
    double g = 0;
    for (double m : means) g += m;
    total += g / static_cast<double>(means.size());
  }
  return total / static_cast<double>(groups.size());
}

const std::vector<DeclaredVariant> kBaseline = {
    {VariantKind::kConfigurable, "make the width a parameter"},
    {VariantKind::kFunctional, "add a saturating mode"},
    {VariantKind::kStructural, "pipeline the adder"},
};

JudgeTask Task(std::string problem, int attempt) {
  JudgeTask t;
  t.problem_id = problem;
  t.attempt_index = attempt;
  t.spec_text = StrCat("Design ", problem, ": an adder.");
  t.candidate_code = StrCat("class Cand_", problem, "_", attempt, " extends Module {}");
  t.baseline_variants = kBaseline;
  t.rubric = std::string(DefaultRubric());
  return t;
}

TEST(ParseScoreTest, Examples) {
  absl::StatusOr<ParsedScore> s = ParseScore("Looks modular.\nSCORE: 7", 0, 10);
  FORGE_ASSERT_OK(s);
  EXPECT_EQ(s->value, 7);
  EXPECT_FALSE(s->clamped);

  s = ParseScore("SCORE: 15", 0, 10);
  FORGE_ASSERT_OK(s);
  EXPECT_EQ(s->value, 10);
  EXPECT_TRUE(s->clamped);

  s = ParseScore("SCORE: -2", 0, 10);
  FORGE_ASSERT_OK(s);
  EXPECT_EQ(s->value, 0);

  EXPECT_FALSE(ParseScore("I would rate this quite highly.", 0, 10).ok());
}

TEST(ParseScoreTest, LastScoreWinsAndDecimalsParse) {
  absl::StatusOr<ParsedScore> s = ParseScore("SCORE: 3 draft\nrevised\n**SCORE:** 6.5", 0, 10);
  FORGE_ASSERT_OK(s);
  EXPECT_DOUBLE_EQ(s->value, 6.5);
}

TEST(FinalizeRecordTest, MeanAndSampleStdev) {
  JudgeRecord a = Rec("p", 0, {4, 5, 6});
  EXPECT_DOUBLE_EQ(a.mean, 5);
  EXPECT_NEAR(a.stdev, 1.0, 1e-12);
  EXPECT_FALSE(a.filtered);

  JudgeRecord b = Rec("p", 0, {1, 9, 2});
  EXPECT_DOUBLE_EQ(b.mean, 4);
  EXPECT_NEAR(b.stdev, std::sqrt(19.0), 1e-12);
  EXPECT_TRUE(b.filtered);

  JudgeRecord c = Rec("p", 0, {5, 5, 5});
  EXPECT_EQ(c.stdev, 0);
  EXPECT_FALSE(c.filtered);

  JudgeRecord d = Rec("p", 0, {8});
  EXPECT_TRUE(d.unusable);
  EXPECT_FALSE(d.filtered);
}

TEST(AggregateTest, PerProblemThenOverall) {
  std::vector<JudgeRecord> records = {Rec("a", 0, {4, 4, 4}), Rec("b", 0, {6, 6, 6}),
                                      Rec("b", 1, {1, 9, 2})};
  absl::StatusOr<JudgeSummary> s = AggregateScores(records);
  FORGE_ASSERT_OK(s);
  EXPECT_DOUBLE_EQ(s->overall_mean, 5);
  EXPECT_DOUBLE_EQ(s->overall_variance, 1);
  EXPECT_EQ(s->used, 2);
  EXPECT_EQ(s->filtered, 1);
}

TEST(AggregateTest, AllFilteredIsAnError) {
  absl::StatusOr<JudgeSummary> s = AggregateScores({Rec("a", 0, {0, 10, 0})});
  ASSERT_FALSE(s.ok());
  EXPECT_THAT(std::string(s.status().message()), HasSubstr("no usable judgments"));
}

TEST(AggregateTest, InfiniteThresholdKeepsEverything) {
  std::vector<JudgeRecord> records = {Rec("a", 0, {0, 10, 0}, INFINITY),
                                      Rec("a", 1, {1, 9, 1}, INFINITY)};
  absl::StatusOr<JudgeSummary> s = AggregateScores(records);
  FORGE_ASSERT_OK(s);
  EXPECT_EQ(s->filtered, 0);
  EXPECT_EQ(s->used, 2);
}

TEST(AggregateTest, MatchesOracleAndIgnoresOrder) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + static_cast<int>(rng() % 30);
    std::vector<JudgeRecord> records;
    for (int i = 0; i < n; ++i) {
      std::vector<double> scores;
      int repeats = 2 + static_cast<int>(rng() % 4);
      for (int r = 0; r < repeats; ++r) scores.push_back(static_cast<double>(rng() % 11));
      records.push_back(
          Rec(StrCat("p", rng() % 6), i, scores, 1.0 + static_cast<double>(rng() % 40) / 10));
    }
    absl::StatusOr<JudgeSummary> s = AggregateScores(records);
    bool any_kept = std::any_of(records.begin(), records.end(),
                                [](const JudgeRecord& r) { return !r.filtered && !r.unusable; });
    ASSERT_EQ(s.ok(), any_kept);
    if (!any_kept) continue;
    ASSERT_NEAR(s->overall_mean, OracleOverall(records), 1e-9);
    std::shuffle(records.begin(), records.end(), rng);
    absl::StatusOr<JudgeSummary> again = AggregateScores(records);
    FORGE_ASSERT_OK(again);
    ASSERT_EQ(again->overall_mean, s->overall_mean);
    ASSERT_EQ(again->overall_variance, s->overall_variance);
  }
}

TEST(RecordJsonTest, RoundTrip) {
  JudgeRecord r = Rec("p7", 3, {2, 3, 4});
  r.failed_calls = 1;
  absl::StatusOr<JudgeRecord> back = RecordFromJson(RecordToJson(r));
  FORGE_ASSERT_OK(back);
  EXPECT_EQ(back->problem_id, "p7");
  EXPECT_EQ(back->attempt_index, 3);
  EXPECT_EQ(back->scores, r.scores);
  EXPECT_EQ(back->failed_calls, 1);
  EXPECT_FALSE(RecordFromJson(nlohmann::json::object()).ok());
}

TEST(JudgeConfigTest, JsonAndValidation) {
  absl::StatusOr<JudgeConfig> c =
      JudgeConfigFromJson({{"repeats", 5}, {"variance_threshold", nullptr}});
  FORGE_ASSERT_OK(c);
  EXPECT_EQ(c->repeats, 5);
  EXPECT_TRUE(std::isinf(c->variance_threshold));
  EXPECT_TRUE(JudgeConfigToJson(*c)["variance_threshold"].is_null());
  EXPECT_FALSE(JudgeConfigFromJson({{"repeats", 1}}).ok());
  EXPECT_FALSE(JudgeConfigFromJson({{"bogus", 1}}).ok());
  EXPECT_FALSE(JudgeConfigFromJson({{"score_min", 5}, {"score_max", 5}}).ok());
}

constexpr char kGeneratorReply[] =
    "Here you go.\n```variants\n"
    "variant: configurable - parameterize the data width\n"
    "variant: functional - add an overflow flag\n"
    "variant: structural - register the output\n```\n";

TEST(BaselineTest, ParsesAndOrdersByKind) {
  absl::StatusOr<std::vector<DeclaredVariant>> v = ParseBaselineVariants(
      "variant: structural - s\nvariant: configurable - c\nvariant: functional - f\n");
  FORGE_ASSERT_OK(v);
  ASSERT_EQ(v->size(), 3u);
  EXPECT_EQ((*v)[0].kind, VariantKind::kConfigurable);
  EXPECT_EQ((*v)[2].kind, VariantKind::kStructural);
  EXPECT_FALSE(ParseBaselineVariants("variant: configurable - c\n").ok());
  EXPECT_FALSE(ParseBaselineVariants("nothing useful").ok());
}

TEST(BaselineTest, CachedAcrossRunsByteIdentical) {
  testing::TempDir dir;
  std::atomic<int> calls{0};
  auto transport = std::make_shared<llm::FunctionTransport>(
      [&](const llm::ChatRequest& r) -> absl::StatusOr<llm::ChatResponse> {
        ++calls;
        EXPECT_THAT(r.messages.back().content, HasSubstr("Design X"));
        llm::ChatResponse resp;
        resp.content = kGeneratorReply;
        return resp;
      });
  llm::ChatClient generator(transport, Fast());
  JudgeConfig config;
  std::string first_file;
  {
    BaselineStore store(dir.path());
    auto v = GenerateBaselineVariants("Design X: a counter.", generator, config, store);
    FORGE_ASSERT_OK(v);
    EXPECT_EQ(v->size(), 3u);
    // Same store, same spec: served from memory.
    FORGE_ASSERT_OK(GenerateBaselineVariants("Design X: a counter.", generator, config, store));
    EXPECT_EQ(calls.load(), 1);
    for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
      first_file = testing::ReadText(e.path());
    }
  }
  BaselineStore reopened(dir.path());
  auto v = GenerateBaselineVariants("Design X: a counter.", generator, config, reopened);
  FORGE_ASSERT_OK(v);
  EXPECT_EQ(calls.load(), 1);
  EXPECT_EQ((*v)[1].description, "add an overflow flag");
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    EXPECT_EQ(testing::ReadText(e.path()), first_file);
  }
}

TEST(BaselineTest, EmptySpecRejected) {
  auto transport = std::make_shared<llm::FunctionTransport>(
      [](const llm::ChatRequest&) -> absl::StatusOr<llm::ChatResponse> {
        ADD_FAILURE() << "generator must not be called";
        return llm::ChatResponse{};
      });
  llm::ChatClient generator(transport, Fast());
  BaselineStore store;
  EXPECT_FALSE(GenerateBaselineVariants("  \n", generator, JudgeConfig{}, store).ok());
}

TEST(JudgePromptTest, ContainsEveryPart) {
  absl::StatusOr<std::string> p = BuildJudgePrompt(Task("p1", 0), JudgeConfig{});
  FORGE_ASSERT_OK(p);
  EXPECT_THAT(*p, HasSubstr("Variability rubric"));
  EXPECT_THAT(*p, HasSubstr("Design p1: an adder."));
  EXPECT_THAT(*p, HasSubstr("- structural: pipeline the adder"));
  EXPECT_THAT(*p, HasSubstr("class Cand_p1_0"));
  EXPECT_THAT(*p, HasSubstr("SCORE: <number from 0 to 10>"));

  JudgeTask no_baseline = Task("p1", 0);
  no_baseline.baseline_variants.clear();
  EXPECT_FALSE(BuildJudgePrompt(no_baseline, JudgeConfig{}).ok());
  JudgeTask no_rubric = Task("p1", 0);
  no_rubric.rubric = " ";
  EXPECT_FALSE(BuildJudgePrompt(no_rubric, JudgeConfig{}).ok());
}

// Scores keyed by "<candidate marker>#<repeat>".
std::shared_ptr<llm::FunctionTransport> FixtureJudge(std::map<std::string, std::string> replies,
                                                     std::atomic<int>* calls = nullptr) {
  return std::make_shared<llm::FunctionTransport>(
      [replies = std::move(replies), calls](const llm::ChatRequest& r)
          -> absl::StatusOr<llm::ChatResponse> {
        if (calls) ++*calls;
        const std::string& text = r.messages.back().content;
        for (const auto& [marker, reply] : replies) {
          std::string::size_type hash = marker.find('#');
          std::string code = marker.substr(0, hash);
          int64_t repeat = std::stoll(marker.substr(hash + 1));
          if (Contains(text, code) && r.seed_hint == repeat) {
            llm::ChatResponse resp;
            resp.content = reply;
            return resp;
          }
        }
        return absl::UnavailableError("no fixture");
      });
}

TEST(ScoreAllTest, FixtureJudgeEndToEnd) {
  std::map<std::string, std::string> replies = {
      {"Cand_a_0 #0", "ok\nSCORE: 4"}, {"Cand_a_0 #1", "SCORE: 5"}, {"Cand_a_0 #2", "SCORE: 6"},
      {"Cand_b_0 #0", "SCORE: 1"},     {"Cand_b_0 #1", "SCORE: 9"}, {"Cand_b_0 #2", "SCORE: 2"},
      {"Cand_c_0 #0", "SCORE: 7"},     {"Cand_c_0 #1", "no score"}, {"Cand_c_0 #2", "SCORE: 7"},
  };
  std::atomic<int> calls{0};
  llm::ChatClient judge(FixtureJudge(replies, &calls), Fast());
  JudgeConfig config;
  absl::StatusOr<std::vector<JudgeRecord>> records =
      ScoreAll({Task("a", 0), Task("b", 0), Task("c", 0)}, judge, config);
  FORGE_ASSERT_OK(records);
  EXPECT_EQ(calls.load(), 9);
  ASSERT_EQ(records->size(), 3u);
  EXPECT_EQ((*records)[0].scores, (std::vector<double>{4, 5, 6}));
  EXPECT_TRUE((*records)[1].filtered);
  EXPECT_EQ((*records)[2].failed_calls, 1);
  EXPECT_EQ((*records)[2].scores, (std::vector<double>{7, 7}));

  absl::StatusOr<JudgeSummary> s = AggregateScores(*records);
  FORGE_ASSERT_OK(s);
  EXPECT_DOUBLE_EQ(s->overall_mean, 6);
  std::string table = RenderSummary(*s, config, "cand");
  EXPECT_THAT(table, HasSubstr("| cand "));
  EXPECT_THAT(table, HasSubstr("6.00"));
  nlohmann::json j = SummaryToJson(*s, config);
  EXPECT_EQ(j["counts"]["filtered"], 1);
}

TEST(ScoreAllTest, SingleRepeatIsRejected) {
  llm::ChatClient judge(FixtureJudge({}), Fast());
  EXPECT_FALSE(ScoreAttempt(Task("a", 0), 1, judge, JudgeConfig{}).ok());
}

}  // namespace
}  // namespace forge::judge
