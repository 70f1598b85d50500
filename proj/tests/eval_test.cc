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

#include <chrono>
#include <random>
#include <set>
#include <thread>

#include "forge/common/strings.h"
#include "forge/common/text.h"
#include "forge/eval/completions.h"
#include "forge/eval/harness.h"
#include "forge/eval/metrics.h"
#include "forge/eval/subprocess.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "passk_oracle.h"
#include "test_util.h"
#include "toolchain_fixtures.h"

namespace forge::eval {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using S = StageStatus;

std::vector<S> Statuses(const std::vector<StageVerdict>& v) {
  std::vector<S> out;
  for (const StageVerdict& x : v) out.push_back(x.status);
  return out;
}

double P(int n, int c, int k) {
  absl::StatusOr<double> v = PassAtK(n, c, k);
  EXPECT_TRUE(v.ok()) << v.status();
  return v.value_or(-1);
}

TEST(PassAtKTest, Examples) {
  EXPECT_EQ(P(5, 0, 1), 0.0);
  EXPECT_EQ(P(5, 5, 5), 1.0);
  EXPECT_NEAR(P(10, 3, 5), 1.0 - 21.0 / 252.0, 1e-12);
  EXPECT_NEAR(P(10, 3, 5), 0.916667, 1e-6);
  EXPECT_NEAR(P(10, 3, 1), 0.3, 1e-12);
}

TEST(PassAtKTest, Preconditions) {
  EXPECT_FALSE(PassAtK(5, 6, 1).ok());
  EXPECT_FALSE(PassAtK(5, -1, 1).ok());
  EXPECT_FALSE(PassAtK(5, 2, 0).ok());
  EXPECT_FALSE(PassAtK(5, 2, 6).ok());
  EXPECT_FALSE(PassAtK(0, 0, 1).ok());
}

TEST(PassAtKTest, MatchesExhaustiveEnumeration) {
  for (int n = 1; n <= 12; ++n) {
    for (int c = 0; c <= n; ++c) {
      std::vector<double> oracle = testing::EnumeratedPassAtK(n, c);
      for (int k = 1; k <= n; ++k) {
        ASSERT_NEAR(P(n, c, k), oracle[k], 1e-12) << n << " " << c << " " << k;
      }
    }
  }
}

TEST(PassAtKTest, MatchesMonteCarloWithinThreeSigma) {
  std::mt19937 rng(77);
  for (int t = 0; t < 40; ++t) {
    int n = 1 + static_cast<int>(rng() % 40);
    int c = static_cast<int>(rng() % (n + 1));
    int k = 1 + static_cast<int>(rng() % n);
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    const int trials = 4000;
    int hits = 0;
    for (int s = 0; s < trials; ++s) {
      std::shuffle(idx.begin(), idx.end(), rng);
      bool any = false;
      for (int i = 0; i < k; ++i) any = any || idx[i] < c;
      hits += any;
    }
    double p = P(n, c, k);
    double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) / trials);
    EXPECT_NEAR(static_cast<double>(hits) / trials, p, 3 * sigma + 1e-9) << n << " " << c << " " << k;
  }
}

TEST(PassAtKTest, Monotonicity) {
  std::mt19937 rng(8);
  for (int t = 0; t < 3000; ++t) {
    int n = 2 + static_cast<int>(rng() % 19);
    int c = static_cast<int>(rng() % n);
    int k = 1 + static_cast<int>(rng() % (n - 1));
    double base = P(n, c, k);
    ASSERT_LE(base, P(n, c, k + 1) + 1e-15);
    ASSERT_LE(base, P(n, c + 1, k) + 1e-15);
    if (n < 20) {
      ASSERT_GE(base + 1e-15, P(n + 1, c, k));
    }
  }
}

ProblemResult Prob(std::string id, int n, int syn, int func, bool evaluated = true) {
  return ProblemResult{std::move(id), n, syn, func, evaluated};
}

TEST(AggregateTest, Examples) {
  absl::StatusOr<EvalReport> r = Aggregate({Prob("a", 5, 5, 0), Prob("b", 5, 0, 0)}, {1});
  FORGE_ASSERT_OK(r);
  EXPECT_DOUBLE_EQ(r->syn_percent, 50.0);
  r = Aggregate({Prob("a", 5, 5, 5), Prob("b", 6, 6, 6)}, {1, 5});
  FORGE_ASSERT_OK(r);
  EXPECT_EQ(*r->pass_at_k[1], 1.0);
  EXPECT_EQ(*r->pass_at_k[5], 1.0);
  r = Aggregate({Prob("a", 10, 10, 3)}, {5});
  FORGE_ASSERT_OK(r);
  EXPECT_NEAR(*r->pass_at_k[5], 0.916667, 1e-6);
}

TEST(AggregateTest, ErrorsAndUnevaluatedProblems) {
  absl::Status st = Aggregate({Prob("a", 10, 3, 3), Prob("short", 3, 1, 1)}, {5}).status();
  EXPECT_FALSE(st.ok());
  EXPECT_THAT(std::string(st.message()), HasSubstr("short"));
  EXPECT_FALSE(Aggregate({Prob("a", 5, 2, 3)}, {1}).ok());  // c_functional > c_syntax
  EXPECT_FALSE(Aggregate({}, {1}).ok());
  absl::StatusOr<EvalReport> r =
      Aggregate({Prob("a", 5, 5, 5), Prob("nosim", 5, 5, 0, false)}, {1});
  FORGE_ASSERT_OK(r);
  EXPECT_EQ(*r->pass_at_k[1], 1.0);
  EXPECT_EQ(r->functional_problems, 1);
  r = Aggregate({Prob("nosim", 5, 4, 0, false)}, {1});
  FORGE_ASSERT_OK(r);
  EXPECT_FALSE(r->pass_at_k[1].has_value());
  EXPECT_THAT(RenderReport(*r, "m"), HasSubstr("n/a"));
}

TEST(AggregateTest, ReportSchema) {
  absl::StatusOr<EvalReport> r = Aggregate({Prob("a", 10, 8, 3), Prob("b", 10, 4, 0)}, {5, 1, 5});
  FORGE_ASSERT_OK(r);
  EXPECT_EQ(r->ks, (std::vector<int>{1, 5}));
  std::string text = RenderReport(*r, "cand");
  auto cells = [](std::string_view row) {
    std::vector<std::string> out;
    for (std::string_view c : SplitString(row, '|')) out.emplace_back(StripWhitespace(c));
    return out;
  };
  std::vector<std::string_view> lines = SplitLines(text);
  ASSERT_EQ(lines.size(), 4u) << text;
  EXPECT_THAT(cells(lines[1]), ElementsAre("", "Model", "P@1", "P@5", "Syn(%)", ""));
  EXPECT_THAT(cells(lines[3]), ElementsAre("", "cand", "15.00", "45.83", "60.00", ""));
  EXPECT_THAT(text, HasSubstr("elaborate"));
  EXPECT_THAT(text, HasSubstr("n=10"));
  nlohmann::json j = ReportToJson(*r);
  EXPECT_NEAR(j["pass_at_k"]["P@1"].get<double>(), 0.15, 1e-12);
  EXPECT_DOUBLE_EQ(j["syn_percent"].get<double>(), 60.0);
}

TEST(StageChainTest, PrefixRule) {
  auto v = [](Stage s, S st) {
    StageVerdict x;
    x.stage = s;
    x.status = st;
    return x;
  };
  FORGE_EXPECT_OK(CheckStageChain({v(Stage::kCompile, S::kFail)}));
  FORGE_EXPECT_OK(CheckStageChain({v(Stage::kCompile, S::kPass), v(Stage::kElaborate, S::kPass),
                                   v(Stage::kSimulate, S::kTimeout)}));
  EXPECT_FALSE(CheckStageChain({}).ok());
  EXPECT_FALSE(CheckStageChain({v(Stage::kElaborate, S::kPass)}).ok());
  EXPECT_FALSE(CheckStageChain({v(Stage::kCompile, S::kFail), v(Stage::kElaborate, S::kPass)}).ok());
  EXPECT_FALSE(CheckStageChain({v(Stage::kCompile, S::kPass), v(Stage::kSimulate, S::kPass)}).ok());
  StageVerdict x = v(Stage::kSimulate, S::kToolMissing);
  x.diagnostic = "d";
  x.log_excerpt = "log";
  absl::StatusOr<StageVerdict> back = VerdictFromJson(VerdictToJson(x));
  FORGE_ASSERT_OK(back);
  EXPECT_EQ(back->status, S::kToolMissing);
  EXPECT_EQ(back->stage, Stage::kSimulate);
  EXPECT_EQ(back->diagnostic, "d");
}

TEST(SubprocessTest, ExitCodesAndOutput) {
  testing::TempDir dir;
  ProcessSpec spec;
  spec.argv = {"sh", "-c", "echo out; echo err >&2; exit 3"};
  spec.cwd = dir.path();
  spec.stdout_path = dir / "o";
  spec.stderr_path = dir / "e";
  absl::StatusOr<ProcessOutcome> r = RunProcess(spec);
  FORGE_ASSERT_OK(r);
  EXPECT_EQ(r->kind, ProcessOutcome::Kind::kExited);
  EXPECT_EQ(r->exit_code, 3);
  EXPECT_EQ(testing::ReadText(dir / "o"), "out\n");
  EXPECT_EQ(testing::ReadText(dir / "e"), "err\n");
  spec.argv = {"definitely-not-a-tool-xyz"};
  EXPECT_EQ(RunProcess(spec)->kind, ProcessOutcome::Kind::kNotFound);
  spec.argv = {"sh", "-c", "kill -9 $$"};
  r = RunProcess(spec);
  EXPECT_EQ(r->kind, ProcessOutcome::Kind::kSignaled);
  EXPECT_EQ(r->signal, 9);
  EXPECT_TRUE(FindExecutable("sh").has_value());
  EXPECT_FALSE(FindExecutable("./nope").has_value());
}

TEST(SubprocessTest, TimeoutKillsWholeProcessGroup) {
  testing::TempDir dir;
  ProcessSpec spec;
  // The background loop is a grandchild; it must die with its parent.
  spec.argv = {"sh", "-c", "(while true; do echo x >> tick; sleep 0.02; done) & sleep 30"};
  spec.cwd = dir.path();
  spec.timeout_s = 0.5;
  spec.stdout_path = dir / "o";
  spec.stderr_path = dir / "e";
  auto start = std::chrono::steady_clock::now();
  absl::StatusOr<ProcessOutcome> r = RunProcess(spec);
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  FORGE_ASSERT_OK(r);
  EXPECT_EQ(r->kind, ProcessOutcome::Kind::kTimedOut);
  EXPECT_LT(elapsed, 2 * spec.timeout_s);
  EXPECT_GE(elapsed, spec.timeout_s);
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  size_t before = testing::ReadText(dir / "tick").size();
  std::this_thread::sleep_for(std::chrono::milliseconds(200));
  EXPECT_EQ(testing::ReadText(dir / "tick").size(), before);
}

TEST(ExtractTest, FencesThinkAndRawText) {
  EXPECT_EQ(ExtractCode("class A extends Module {}"), "class A extends Module {}\n");
  EXPECT_EQ(ExtractCode("x\n```scala\nclass A\n```\ny\n```scala\nclass B\n```\n"), "class B\n");
  EXPECT_EQ(ExtractCode("```scala\nclass A\n```\n```verilog\nmodule m\n```\n"), "class A\n");
  EXPECT_EQ(ExtractCode("```text\nonly\n```"), "only\n");
  EXPECT_EQ(ExtractCode("<think>```scala\nclass Draft\n```</think>\n```scala\nclass Final\n```"),
            "class Final\n");
}

TEST(DetectTopTest, LastConcreteModule) {
  absl::StatusOr<TopDetection> t = DetectTopModule(
      "abstract class Base extends Module\nclass Leaf extends Module {}\n"
      "class Bb extends BlackBox {}\nclass Top extends Module {}\n");
  FORGE_ASSERT_OK(t);
  EXPECT_EQ(t->name, "Top");
  EXPECT_TRUE(t->ambiguous);
  t = DetectTopModule("class Only extends RawModule {}\n");
  FORGE_ASSERT_OK(t);
  EXPECT_EQ(t->name, "Only");
  EXPECT_FALSE(t->ambiguous);
  EXPECT_EQ(DetectTopModule("object X").status().code(), absl::StatusCode::kNotFound);
}

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override { tc_ = testing::FakeToolchain(dir_.path()); }

  EvalJob Job(std::string code, std::optional<std::string> tb = std::nullopt) {
    EvalJob j;
    j.problem_id = "p";
    j.chisel_code = std::move(code);
    j.testbench = std::move(tb);
    j.timeouts = {5, 5, 5};
    return j;
  }

  testing::TempDir dir_;
  ToolchainConfig tc_;
};

TEST_F(HarnessTest, GoldenModule) {
  std::vector<StageVerdict> v = RunJob(Job(testing::Candidate("Adder")), tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kPass)) << v.back().log_excerpt;
  EXPECT_EQ(v[0].stage, Stage::kCompile);
  EXPECT_EQ(v[1].stage, Stage::kElaborate);
}

TEST_F(HarnessTest, SyntaxErrorStopsAtCompile) {
  std::vector<StageVerdict> v = RunJob(Job(testing::Candidate("Adder", "SYNTAX_ERROR")), tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kFail));
  EXPECT_THAT(v[0].log_excerpt, HasSubstr("expected"));
}

TEST_F(HarnessTest, TestbenchMismatchFailsSimulate) {
  std::vector<StageVerdict> v =
      RunJob(Job(testing::Candidate("Adder"), "// EXPECT_FAIL sum should be 5, got 4\n"), tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kPass, S::kFail));
  EXPECT_THAT(v[2].log_excerpt, HasSubstr("TEST FAILED"));
  v = RunJob(Job(testing::Candidate("Adder"), "module tb; endmodule\n"), tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kPass, S::kPass));
  v = RunJob(Job(testing::Candidate("Adder", "@sim=nosentinel"), "module tb; endmodule\n"), tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kPass, S::kFail));
  EXPECT_THAT(v[2].log_excerpt, HasSubstr("sentinel"));
}

TEST_F(HarnessTest, ElabErrorDiagnosticsAndDefaultRetry) {
  std::string needs_args =
      "import chisel3._\nclass Acc(w: Int) extends Module {\n  val io = IO(new Bundle {})\n}\n";
  std::vector<StageVerdict> v = RunJob(Job(needs_args), tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kFail));
  EXPECT_THAT(v[1].diagnostic, ::testing::StartsWith("ctor-args"));
  // A parameterless wrapper is tried when the top needs arguments.
  std::string with_wrapper = needs_args + "class AccDefault extends Acc(8)\n";
  EvalJob j = Job(with_wrapper);
  j.top_module = "Acc";
  v = RunJob(j, tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kPass)) << v.back().log_excerpt;
  j.top_module = "Missing";
  v = RunJob(j, tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kFail));
  EXPECT_THAT(v[1].diagnostic, ::testing::StartsWith("class-not-found"));
  v = RunJob(Job(testing::Candidate("Adder", "@elab=nomodule")), tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kFail));
  EXPECT_THAT(v[1].log_excerpt, HasSubstr("module Adder"));
}

TEST_F(HarnessTest, NoModuleClassFailsElaborate) {
  std::vector<StageVerdict> v = RunJob(Job("object Util { def f = 1 }\n"), tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kFail));
  EXPECT_THAT(v[1].log_excerpt, HasSubstr("no module class"));
}

TEST_F(HarnessTest, ToolMissingIsDistinct) {
  tc_.simulate_cmd = {"no-such-simulator-xyz", "{sv}"};
  std::vector<StageVerdict> v = RunJob(Job(testing::Candidate("A"), "module tb; endmodule\n"), tc_);
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kPass, S::kToolMissing));
  EXPECT_THAT(MissingTools(tc_, true), ElementsAre("no-such-simulator-xyz"));
  EXPECT_TRUE(MissingTools(tc_, false).empty());
  tc_.compile_cmd = {"./bin/not-there"};
  EXPECT_THAT(MissingTools(tc_, false), ElementsAre("./bin/not-there"));
}

TEST_F(HarnessTest, TimeoutVerdict) {
  EvalJob j = Job(testing::Candidate("A", "@elab=hang"));
  j.timeouts.elaborate_s = 0.3;
  auto start = std::chrono::steady_clock::now();
  std::vector<StageVerdict> v = RunJob(j, tc_);
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_THAT(Statuses(v), ElementsAre(S::kPass, S::kTimeout));
  EXPECT_LT(v[1].wall_time_s, 0.6);
  EXPECT_LT(elapsed, 5.0);
}

TEST_F(HarnessTest, JobsAreIsolatedAndCleanedUp) {
  // One job crashes its compiler and one scribbles over its own source;
  // neither affects the others.
  std::vector<EvalJob> jobs = {Job(testing::Candidate("A")), Job(testing::Candidate("B", "@compile=crash")),
                               Job(testing::Candidate("C")), Job(testing::Candidate("D", "SYNTAX_ERROR"))};
  for (int i = 0; i < 4; ++i) jobs[i].attempt_index = i;
  std::vector<std::vector<StageVerdict>> r = RunJobs(jobs, tc_, 4);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_THAT(Statuses(r[0]), ElementsAre(S::kPass, S::kPass));
  EXPECT_THAT(Statuses(r[1]), ElementsAre(S::kFail));
  EXPECT_THAT(Statuses(r[2]), ElementsAre(S::kPass, S::kPass));
  EXPECT_THAT(Statuses(r[3]), ElementsAre(S::kFail));
  EXPECT_TRUE(std::filesystem::is_empty(tc_.work_root));
}

TEST_F(HarnessTest, KeepWorkdirs) {
  tc_.keep_workdirs = true;
  RunJob(Job(testing::Candidate("A")), tc_);
  RunJob(Job(testing::Candidate("A")), tc_);
  std::set<std::string> dirs;
  for (const auto& e : std::filesystem::directory_iterator(tc_.work_root)) {
    dirs.insert(e.path().filename().string());
    EXPECT_TRUE(std::filesystem::exists(e.path() / "out/Top.sv"));
    EXPECT_TRUE(std::filesystem::exists(e.path() / ".forge_compile.stdout"));
  }
  EXPECT_EQ(dirs.size(), 2u);
}

TEST_F(HarnessTest, RandomScriptsKeepPrefixInvariant) {
  std::mt19937 rng(31);
  std::vector<testing::ScriptedJob> scripted;
  std::vector<EvalJob> jobs;
  for (int i = 0; i < 60; ++i) {
    scripted.push_back(testing::RandomScriptedJob(rng, i, 0.3));
    jobs.push_back(scripted.back().job);
  }
  std::vector<std::vector<StageVerdict>> r = RunJobs(jobs, tc_, 4);
  for (size_t i = 0; i < r.size(); ++i) {
    FORGE_ASSERT_OK(CheckStageChain(r[i]));
    ASSERT_EQ(Statuses(r[i]), scripted[i].expected) << jobs[i].chisel_code;
  }
}

TEST(ToolchainConfigTest, JsonAndValidation) {
  ToolchainConfig tc;
  FORGE_EXPECT_OK(tc.Validate());
  absl::StatusOr<ToolchainConfig> back = ToolchainConfigFromJson(ToolchainConfigToJson(tc));
  FORGE_ASSERT_OK(back);
  EXPECT_EQ(back->elaborate_cmd, tc.elaborate_cmd);
  EXPECT_EQ(back->timeouts.compile_s, 300);
  EXPECT_EQ(back->versions.at("scala"), "2.13.12");
  EXPECT_FALSE(ToolchainConfigFromJson({{"compile_timeout", 1}}).ok());
  tc.compile_cmd.clear();
  EXPECT_FALSE(tc.Validate().ok());
}

TEST(CompletionsTest, ReadBuildAndTally) {
  testing::TempDir dir;
  CompletionRecord a{"a", "prompt", {"```scala\nclass X extends Module {}\n```", "junk"}, "tb", std::nullopt};
  CompletionRecord b{"b", "prompt", {"class Y extends Module {}\nclass Z extends Module {}"}, std::nullopt, std::nullopt};
  testing::WriteText(dir / "c.jsonl",
                     StrCat(CompletionToJson(a).dump(), "\n", CompletionToJson(b).dump(), "\n"));
  absl::StatusOr<std::vector<CompletionRecord>> recs = ReadCompletions(dir / "c.jsonl");
  FORGE_ASSERT_OK(recs);
  ASSERT_EQ(recs->size(), 2u);
  JobPlan plan = BuildJobs(*recs, StageTimeouts{});
  ASSERT_EQ(plan.jobs.size(), 3u);
  EXPECT_EQ(plan.jobs[0].top_module, "X");
  EXPECT_EQ(plan.jobs[1].attempt_index, 1);
  EXPECT_EQ(plan.jobs[2].top_module, "Z");
  EXPECT_EQ(plan.warnings.size(), 1u);  // ambiguous top in b

  auto pass = [](Stage s) { StageVerdict v; v.stage = s; v.status = S::kPass; return v; };
  std::vector<std::vector<StageVerdict>> verdicts = {
      {pass(Stage::kCompile), pass(Stage::kElaborate), pass(Stage::kSimulate)},
      {pass(Stage::kCompile), pass(Stage::kElaborate)},
      {pass(Stage::kCompile), pass(Stage::kElaborate)}};
  std::vector<ProblemResult> t = TallyAll(*recs, plan.jobs, verdicts);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0].n, 2);
  EXPECT_EQ(t[0].c_syntax, 2);
  EXPECT_EQ(t[0].c_functional, 1);
  EXPECT_TRUE(t[0].functional_evaluated);
  EXPECT_FALSE(t[1].functional_evaluated);
  nlohmann::json j = JobVerdictsToJson(plan.jobs[0], verdicts[0]);
  EXPECT_EQ(j["problem_id"], "a");

  testing::WriteText(dir / "dup.jsonl",
                     StrCat(CompletionToJson(a).dump(), "\n", CompletionToJson(a).dump(), "\n"));
  EXPECT_FALSE(ReadCompletions(dir / "dup.jsonl").ok());
  testing::WriteText(dir / "bad.jsonl", StrCat(CompletionToJson(a).dump(), "\nnope\n"));
  absl::Status st = ReadCompletions(dir / "bad.jsonl").status();
  EXPECT_THAT(std::string(st.message()), HasSubstr("line 2"));
}

}  // namespace
}  // namespace forge::eval
