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

#ifndef FORGE_TESTS_E2E_FIXTURES_H_
#define FORGE_TESTS_E2E_FIXTURES_H_

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "corpus_fixtures.h"
#include "forge/cli/cli.h"
#include "forge/common/strings.h"
#include "forge/eval/harness.h"
#include "nlohmann/json.hpp"
#include "test_util.h"
#include "toolchain_fixtures.h"

namespace forge::testing {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

inline CliRun Forge(std::vector<std::string> args) {
  args.insert(args.begin(), "forge");
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::RunCli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Long enough to clear the default line and token minimums.
inline std::string VerilogCorpusModule(int index) {
  std::string out = StrCat("module Dec", index, "(\n  input clk,\n  input rst,\n",
                           "  input [7:0] a,\n  input [7:0] b,\n  output reg [7:0] q\n);\n",
                           "  reg [7:0] acc;\n  always @(posedge clk) begin\n");
  StrAppend(&out, "    if (rst) acc <= 8'd0;\n    else acc <= acc + a + 8'd", index, ";\n");
  StrAppend(&out, "    q <= acc ^ b;\n  end\nendmodule\n");
  return out;
}

// A model's answer scripted for the fake toolchain.
inline std::string ScriptedCompletion(std::string_view top, std::string_view directives) {
  return StrCat("Here is the module.\n```scala\n", Candidate(top, directives), "```\n");
}

// Everything the end-to-end pipeline reads: a 20-file corpus (10 Chisel,
// 10 Verilog), fixture model answers per role, a fake toolchain and the
// shared config file tying them together.
struct E2EWorkspace {
  std::filesystem::path root;
  std::filesystem::path config;
  std::filesystem::path chisel_dir;
  std::filesystem::path verilog_dir;
  std::filesystem::path completions;
  // Completions per problem passing elaboration, in problem order.
  std::vector<int> elab_passes;
  // Problems carrying a testbench; the fake simulator passes every
  // elaborated attempt of those.
  std::vector<bool> has_testbench;
  int attempts_per_problem = 5;
};

inline E2EWorkspace MakeE2EWorkspace(const std::filesystem::path& root) {
  using nlohmann::json;
  E2EWorkspace ws;
  ws.root = root;
  ws.chisel_dir = root / "corpus/chisel";
  ws.verilog_dir = root / "corpus/verilog";
  for (int i = 0; i < 10; ++i) {
    WriteText(ws.chisel_dir / StrCat("Gen", i, ".scala"), ChiselModule(i, 12));
    WriteText(ws.verilog_dir / StrCat("dec", i, ".v"), VerilogCorpusModule(i));
  }

  json annotator = json::array(
      {{{"response", "Design {{extract:class | extends}}: a bank of registers fed by io.in."}}});
  json teacher = json::array(
      {{{"contains", "<reference_answer>"},
        {"response",
         "<think>\nThe datapath is a chain of registers on io.in. RegNext gives each one a "
         "cycle of delay.\n</think>\n```scala\n{{extract:<reference_answer>\n|</reference_answer>}}"
         "```\n"}},
       {{"response",
         "<think>\nThe Verilog keeps an accumulator and xors it into q. Width is the natural "
         "parameter.\n</think>\n\n```variants\n"
         "variant: configurable - data width parameter\n"
         "variant: structural - split the accumulator into a pipeline stage\n```\n\n"
         "```scala\nimport chisel3._\n\nclass Dec(val w: Int = 8) extends Module {\n"
         "  val io = IO(new Bundle {\n    val a = Input(UInt(w.W))\n"
         "    val q = Output(UInt(w.W))\n  })\n  io.q := RegNext(io.a)\n}\n```\n"}}});
  json generator = json::array(
      {{{"response",
         "```variants\nvariant: configurable - parameterize the width\n"
         "variant: functional - add a clear input\n"
         "variant: structural - register the output twice\n```\n"}}});
  json judge = json::array({{{"response", "Width is a parameter, little else is.\nSCORE: 6"}}});
  WriteText(root / "fixtures/annotator.json", annotator.dump(2));
  WriteText(root / "fixtures/teacher.json", teacher.dump(2));
  WriteText(root / "fixtures/generator.json", generator.dump(2));
  WriteText(root / "fixtures/judge.json", judge.dump(2));

  eval::ToolchainConfig tc = FakeToolchain(root);
  json llm = {{"default", {{"provider", "fixture"}, {"max_retries", 1}}}};
  for (const char* role : {"annotator", "teacher", "judge", "generator"}) {
    llm[role] = {{"model_name", StrCat(role, "-fixture")},
                 {"fixture_path", (root / StrCat("fixtures/", role, ".json")).string()},
                 {"cache_dir", (root / "cache").string()}};
  }
  json config = {{"llm", llm},
                 {"dataset", {{"ratio", "3:7"}, {"seed", 11}}},
                 {"toolchain", eval::ToolchainConfigToJson(tc)},
                 {"eval", {{"ks", {1, 5}}, {"jobs", 4}, {"label", "fixture-model"}}}};
  ws.config = root / "forge.json";
  WriteText(ws.config, config.dump(2));

  // Four problems; attempts fail at scripted stages.
  const std::vector<std::vector<std::string>> scripts = {
      {"", "", "", "", ""},
      {"", "@compile=fail", "", "@elab=fail", "@compile=fail"},
      {"@compile=fail", "@elab=fail", "@elab=nomodule", "@compile=fail", "@compile=fail"},
      {"@elab=fail", "", "@compile=fail", "@compile=fail", "@compile=fail"}};
  std::string lines;
  for (size_t p = 0; p < scripts.size(); ++p) {
    std::string top = StrCat("Prob", p);
    json rec = {{"problem_id", StrCat("p", p)},
                {"prompt", StrCat("Design ", top, ": an 8-bit register with an enable.")},
                {"top_module", top}};
    json completions = json::array();
    int passes = 0;
    for (const std::string& s : scripts[p]) {
      completions.push_back(ScriptedCompletion(top, s));
      passes += s.empty();
    }
    rec["completions"] = completions;
    if (p != 2) rec["testbench"] = "// drives a and checks q\n";
    ws.has_testbench.push_back(p != 2);
    ws.elab_passes.push_back(passes);
    StrAppend(&lines, rec.dump(), "\n");
  }
  ws.completions = root / "completions.jsonl";
  WriteText(ws.completions, lines);
  return ws;
}

struct E2EResult {
  std::vector<std::pair<std::string, CliRun>> steps;
  std::filesystem::path dataset;
  std::filesystem::path eval_report;
  std::filesystem::path judge_summary;

  bool ok() const {
    for (const auto& [name, run] : steps) {
      if (run.code != 0) return false;
    }
    return !steps.empty();
  }
  std::string Failure() const {
    for (const auto& [name, run] : steps) {
      if (run.code != 0) return StrCat(name, " exited ", run.code, ": ", run.err);
    }
    return "";
  }
};

// corpus -> distill -> dataset mix -> eval -> judge, each step through the
// command-line entry point. Stops at the first failing step.
inline E2EResult RunE2E(const E2EWorkspace& ws) {
  E2EResult r;
  std::filesystem::path out = ws.root / "out";
  std::filesystem::create_directories(out);
  std::string cfg = ws.config.string();
  auto step = [&](std::string name, std::vector<std::string> args) {
    args.insert(args.begin(), {"--config", cfg});
    r.steps.emplace_back(std::move(name), Forge(std::move(args)));
    return r.steps.back().second.code == 0;
  };
  auto p = [&](const char* name) { return (out / name).string(); };
  bool ok = step("ingest chisel", {"corpus", "ingest", "--root", ws.chisel_dir.string(),
                                   "--lang", "chisel", "--out", p("s2c_samples.jsonl")}) &&
            step("ingest verilog", {"corpus", "ingest", "--root", ws.verilog_dir.string(),
                                    "--lang", "verilog", "--out", p("d2c_samples.jsonl")}) &&
            step("distill s2c", {"distill", "--in", p("s2c_samples.jsonl"), "--out",
                                 p("s2c.jsonl")}) &&
            step("distill d2c", {"distill", "--in", p("d2c_samples.jsonl"), "--out",
                                 p("d2c.jsonl")}) &&
            step("dataset mix", {"dataset", "mix", "--completion", p("s2c.jsonl"),
                                 "--decompile", p("d2c.jsonl"), "--total", "10", "--out",
                                 p("mixed.jsonl")}) &&
            step("eval", {"eval", "--in", ws.completions.string(), "--out",
                          p("verdicts.jsonl")}) &&
            step("judge", {"judge", "--in", ws.completions.string(), "--out", p("judge.jsonl")});
  (void)ok;
  r.dataset = out / "mixed.jsonl";
  r.eval_report = out / "verdicts.report.txt";
  r.judge_summary = out / "judge.summary.json";
  return r;
}

}  // namespace forge::testing

#endif  // FORGE_TESTS_E2E_FIXTURES_H_
