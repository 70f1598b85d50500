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

#ifndef FORGE_EVAL_HARNESS_H_
#define FORGE_EVAL_HARNESS_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace forge::eval {

enum class Stage { kCompile, kElaborate, kSimulate };
enum class StageStatus { kPass, kFail, kTimeout, kToolMissing };

std::string_view StageName(Stage stage);
std::string_view StageStatusName(StageStatus status);
absl::StatusOr<Stage> ParseStage(std::string_view name);
absl::StatusOr<StageStatus> ParseStageStatus(std::string_view name);

struct StageTimeouts {
  double compile_s = 300;
  double elaborate_s = 120;
  double simulate_s = 120;
};

struct EvalJob {
  std::string problem_id;
  int attempt_index = 0;
  std::string chisel_code;
  std::optional<std::string> testbench;
  std::string top_module;
  StageTimeouts timeouts;
};

struct StageVerdict {
  Stage stage = Stage::kCompile;
  StageStatus status = StageStatus::kFail;
  std::string log_excerpt;
  double wall_time_s = 0;
  // Message of the elaborator's ELAB_ERROR line, when there was one.
  std::string diagnostic;
};

nlohmann::json VerdictToJson(const StageVerdict& v);
absl::StatusOr<StageVerdict> VerdictFromJson(const nlohmann::json& j);

// Checks that Elaborate appears only after a passing Compile and Simulate
// only after a passing Elaborate, with no stage repeated.
absl::Status CheckStageChain(const std::vector<StageVerdict>& verdicts);

// How each stage is invoked. Every command is an argv template; the tokens
// {workdir}, {top}, {out}, {sv}, {tb} and {src} are substituted per job.
// stdout/stderr of each stage land in the job directory.
struct ToolchainConfig {
  // Project template copied into every job directory. May be empty, in which
  // case each job starts from an empty directory.
  std::filesystem::path harness_dir;
  // Where the candidate code goes, relative to the job directory.
  std::string source_slot = "src/main/scala/Candidate.scala";
  std::vector<std::string> compile_cmd = {"sbt", "-batch", "compile"};
  std::vector<std::string> elaborate_cmd = {"sbt", "-batch", "run --top {top} --out {out}"};
  std::vector<std::string> simulate_cmd = {
      "sh", "-c",
      "verilator --binary --timing -Wno-fatal --top-module tb -o sim {sv} {tb} "
      "&& ./obj_dir/sim"};
  // Emitted SystemVerilog path, relative to the job directory.
  std::string output_name = "out/Top.sv";
  std::string testbench_name = "testbench.sv";
  std::string pass_sentinel = "TEST PASSED";
  StageTimeouts timeouts;
  // Parent of the per-job directories; the system temp dir when empty.
  std::filesystem::path work_root;
  bool keep_workdirs = false;
  // Recorded in run manifests; not used to drive the build.
  std::map<std::string, std::string> versions = {{"scala", "2.13.12"},
                                                 {"chisel3", "3.6.1"}};

  absl::Status Validate() const;
};

absl::StatusOr<ToolchainConfig> ToolchainConfigFromJson(const nlohmann::json& j);
nlohmann::json ToolchainConfigToJson(const ToolchainConfig& cfg);

// Returns the programs named by the stage commands that cannot be found.
std::vector<std::string> MissingTools(const ToolchainConfig& cfg, bool with_simulator);

// Pulls candidate code out of a model response. The reasoning section is
// dropped, then the last scala/chisel (or unlabeled) fenced block wins. With
// no fences at all the remaining text is the code.
std::string ExtractCode(std::string_view model_output);

struct TopDetection {
  std::string name;
  bool ambiguous = false;
};

// Last concrete class extending a module base. NotFound if there is none.
absl::StatusOr<TopDetection> DetectTopModule(std::string_view code);

// Runs the stage chain for one job in a private working directory.
std::vector<StageVerdict> RunJob(const EvalJob& job, const ToolchainConfig& toolchain);

// Runs jobs on a bounded pool. Output is in input order.
std::vector<std::vector<StageVerdict>> RunJobs(const std::vector<EvalJob>& jobs,
                                               const ToolchainConfig& toolchain,
                                               int parallelism);

}  // namespace forge::eval

#endif  // FORGE_EVAL_HARNESS_H_
