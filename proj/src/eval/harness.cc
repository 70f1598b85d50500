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

#include "forge/eval/harness.h"

#include <stdlib.h>

#include <algorithm>
#include <fstream>

#include "forge/common/chisel.h"
#include "forge/common/files.h"
#include "forge/common/parallel.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"
#include "forge/common/text.h"
#include "forge/eval/subprocess.h"

namespace forge::eval {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr size_t kExcerptBytes = 2000;

std::string Tail(std::string_view s, size_t max_bytes) {
  if (s.size() <= max_bytes) return std::string(s);
  size_t start = s.size() - max_bytes;
  while (start < s.size() && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) ++start;
  return StrCat("...", s.substr(start));
}

std::string ReadOrEmpty(const fs::path& p) {
  absl::StatusOr<std::string> s = ReadFile(p);
  return s.ok() ? *std::move(s) : std::string();
}

std::string Substitute(std::string_view token, const std::map<std::string, std::string>& vars) {
  std::string out;
  size_t pos = 0;
  while (pos < token.size()) {
    size_t open = token.find('{', pos);
    if (open == std::string_view::npos) break;
    size_t close = token.find('}', open);
    if (close == std::string_view::npos) break;
    auto it = vars.find(std::string(token.substr(open + 1, close - open - 1)));
    out.append(token.substr(pos, open - pos));
    if (it == vars.end()) {
      out.append(token.substr(open, close - open + 1));
    } else {
      out.append(it->second);
    }
    pos = close + 1;
  }
  out.append(token.substr(pos));
  return out;
}

std::vector<std::string> Expand(const std::vector<std::string>& argv,
                                const std::map<std::string, std::string>& vars) {
  std::vector<std::string> out;
  out.reserve(argv.size());
  for (const std::string& a : argv) out.push_back(Substitute(a, vars));
  return out;
}

// Last stderr line of the form "ELAB_ERROR: <msg>", or empty.
std::string FindElabError(std::string_view stderr_text) {
  std::string found;
  for (std::string_view line : SplitLines(stderr_text)) {
    std::string_view l = StripWhitespace(line);
    if (ConsumePrefix(&l, "ELAB_ERROR:")) found = std::string(StripWhitespace(l));
  }
  return found;
}

struct StageRun {
  StageVerdict verdict;
  std::string stdout_text;
  std::string stderr_text;
};

StageRun RunStage(Stage stage, std::vector<std::string> argv, const fs::path& workdir,
                  double timeout_s) {
  StageRun run;
  run.verdict.stage = stage;
  std::string base(StageName(stage));
  ProcessSpec spec;
  spec.argv = std::move(argv);
  spec.cwd = workdir;
  spec.timeout_s = timeout_s;
  spec.stdout_path = workdir / StrCat(".forge_", base, ".stdout");
  spec.stderr_path = workdir / StrCat(".forge_", base, ".stderr");
  absl::StatusOr<ProcessOutcome> outcome = RunProcess(spec);
  if (!outcome.ok()) {
    run.verdict.status = StageStatus::kFail;
    run.verdict.log_excerpt = std::string(outcome.status().message());
    return run;
  }
  run.verdict.wall_time_s = outcome->wall_time_s;
  run.stdout_text = ReadOrEmpty(spec.stdout_path);
  run.stderr_text = ReadOrEmpty(spec.stderr_path);
  switch (outcome->kind) {
    case ProcessOutcome::Kind::kNotFound:
      run.verdict.status = StageStatus::kToolMissing;
      run.verdict.log_excerpt = StrCat("tool not found: ", spec.argv[0]);
      return run;
    case ProcessOutcome::Kind::kTimedOut:
      run.verdict.status = StageStatus::kTimeout;
      break;
    case ProcessOutcome::Kind::kSignaled:
    case ProcessOutcome::Kind::kExited:
      run.verdict.status = outcome->succeeded() ? StageStatus::kPass : StageStatus::kFail;
      break;
  }
  std::string log = run.stderr_text;
  if (!run.stdout_text.empty()) StrAppend(&log, log.empty() ? "" : "\n", run.stdout_text);
  if (outcome->kind == ProcessOutcome::Kind::kTimedOut) {
    StrAppend(&log, "\n[killed after ", timeout_s, "s]");
  } else if (outcome->kind == ProcessOutcome::Kind::kSignaled) {
    StrAppend(&log, "\n[terminated by signal ", outcome->signal, "]");
  }
  run.verdict.log_excerpt = Tail(log, kExcerptBytes);
  return run;
}

absl::StatusOr<fs::path> MakeJobDir(const ToolchainConfig& tc) {
  std::error_code ec;
  fs::path root = tc.work_root.empty() ? fs::temp_directory_path(ec) : tc.work_root;
  if (ec) return absl::InternalError(StrCat("no temp directory: ", ec.message()));
  fs::create_directories(root, ec);
  if (ec) return absl::InternalError(StrCat("cannot create ", root.string(), ": ", ec.message()));
  std::string pattern = (root / "forge-job-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) {
    return absl::InternalError(StrCat("mkdtemp failed under ", root.string()));
  }
  fs::path dir(pattern);
  if (!tc.harness_dir.empty()) {
    fs::copy(tc.harness_dir, dir, fs::copy_options::recursive | fs::copy_options::copy_symlinks,
             ec);
    if (ec) {
      return absl::InternalError(
          StrCat("cannot copy harness template ", tc.harness_dir.string(), ": ", ec.message()));
    }
  }
  return dir;
}

absl::Status WritePlain(const fs::path& p, std::string_view content) {
  std::error_code ec;
  fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) return absl::InternalError(StrCat("cannot write ", p.string()));
  return absl::OkStatus();
}

bool DefinesDefaultWrapper(std::string_view code, std::string_view top) {
  std::string name = StrCat(top, "Default");
  for (std::string_view kw : {"object ", "class "}) {
    size_t pos = 0;
    std::string needle = StrCat(kw, name);
    while ((pos = code.find(needle, pos)) != std::string_view::npos) {
      size_t end = pos + needle.size();
      if (end >= code.size() || !(std::isalnum(static_cast<unsigned char>(code[end])) || code[end] == '_')) {
        return true;
      }
      pos = end;
    }
  }
  return false;
}

StageVerdict Failure(Stage stage, std::string message) {
  StageVerdict v;
  v.stage = stage;
  v.status = StageStatus::kFail;
  v.log_excerpt = std::move(message);
  return v;
}

}  // namespace

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kCompile: return "compile";
    case Stage::kElaborate: return "elaborate";
    case Stage::kSimulate: return "simulate";
  }
  return "?";
}

std::string_view StageStatusName(StageStatus status) {
  switch (status) {
    case StageStatus::kPass: return "pass";
    case StageStatus::kFail: return "fail";
    case StageStatus::kTimeout: return "timeout";
    case StageStatus::kToolMissing: return "tool-missing";
  }
  return "?";
}

absl::StatusOr<Stage> ParseStage(std::string_view name) {
  for (Stage s : {Stage::kCompile, Stage::kElaborate, Stage::kSimulate}) {
    if (name == StageName(s)) return s;
  }
  return absl::InvalidArgumentError(StrCat("unknown stage '", name, "'"));
}

absl::StatusOr<StageStatus> ParseStageStatus(std::string_view name) {
  for (StageStatus s : {StageStatus::kPass, StageStatus::kFail, StageStatus::kTimeout,
                        StageStatus::kToolMissing}) {
    if (name == StageStatusName(s)) return s;
  }
  return absl::InvalidArgumentError(StrCat("unknown stage status '", name, "'"));
}

json VerdictToJson(const StageVerdict& v) {
  json j = {{"stage", StageName(v.stage)},
            {"status", StageStatusName(v.status)},
            {"wall_time_s", v.wall_time_s},
            {"log_excerpt", v.log_excerpt}};
  if (!v.diagnostic.empty()) j["diagnostic"] = v.diagnostic;
  return j;
}

absl::StatusOr<StageVerdict> VerdictFromJson(const json& j) {
  StageVerdict v;
  try {
    FORGE_ASSIGN_OR_RETURN(v.stage, ParseStage(j.at("stage").get<std::string>()));
    FORGE_ASSIGN_OR_RETURN(v.status, ParseStageStatus(j.at("status").get<std::string>()));
    v.wall_time_s = j.value("wall_time_s", 0.0);
    v.log_excerpt = j.value("log_excerpt", "");
    v.diagnostic = j.value("diagnostic", "");
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad verdict: ", e.what()));
  }
  return v;
}

absl::Status CheckStageChain(const std::vector<StageVerdict>& verdicts) {
  static constexpr Stage kOrder[] = {Stage::kCompile, Stage::kElaborate, Stage::kSimulate};
  if (verdicts.empty()) return absl::FailedPreconditionError("no stage verdicts");
  if (verdicts.size() > 3) return absl::FailedPreconditionError("more than three stages");
  for (size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i].stage != kOrder[i]) {
      return absl::FailedPreconditionError(
          StrCat("stage ", i, " is ", StageName(verdicts[i].stage), ", expected ",
                 StageName(kOrder[i])));
    }
    if (i > 0 && verdicts[i - 1].status != StageStatus::kPass) {
      return absl::FailedPreconditionError(
          StrCat(StageName(verdicts[i].stage), " ran after a non-passing ",
                 StageName(verdicts[i - 1].stage)));
    }
  }
  return absl::OkStatus();
}

absl::Status ToolchainConfig::Validate() const {
  if (compile_cmd.empty()) return absl::InvalidArgumentError("compile command is empty");
  if (elaborate_cmd.empty()) return absl::InvalidArgumentError("elaborate command is empty");
  if (simulate_cmd.empty()) return absl::InvalidArgumentError("simulate command is empty");
  if (source_slot.empty() || fs::path(source_slot).is_absolute()) {
    return absl::InvalidArgumentError("source slot must be a relative path");
  }
  if (output_name.empty() || fs::path(output_name).is_absolute()) {
    return absl::InvalidArgumentError("output name must be a relative path");
  }
  if (!(timeouts.compile_s > 0 && timeouts.elaborate_s > 0 && timeouts.simulate_s > 0)) {
    return absl::InvalidArgumentError("stage timeouts must be positive");
  }
  if (pass_sentinel.empty()) return absl::InvalidArgumentError("pass sentinel is empty");
  if (!harness_dir.empty() && !fs::is_directory(harness_dir)) {
    return absl::NotFoundError(StrCat("harness template not found: ", harness_dir.string()));
  }
  return absl::OkStatus();
}

absl::StatusOr<ToolchainConfig> ToolchainConfigFromJson(const json& j) {
  ToolchainConfig c;
  if (!j.is_object()) return absl::InvalidArgumentError("toolchain config must be an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const json& v = it.value();
      if (k == "harness_dir") c.harness_dir = v.get<std::string>();
      else if (k == "source_slot") c.source_slot = v.get<std::string>();
      else if (k == "compile_cmd") c.compile_cmd = v.get<std::vector<std::string>>();
      else if (k == "elaborate_cmd") c.elaborate_cmd = v.get<std::vector<std::string>>();
      else if (k == "simulate_cmd") c.simulate_cmd = v.get<std::vector<std::string>>();
      else if (k == "output_name") c.output_name = v.get<std::string>();
      else if (k == "testbench_name") c.testbench_name = v.get<std::string>();
      else if (k == "pass_sentinel") c.pass_sentinel = v.get<std::string>();
      else if (k == "compile_timeout_s") c.timeouts.compile_s = v.get<double>();
      else if (k == "elaborate_timeout_s") c.timeouts.elaborate_s = v.get<double>();
      else if (k == "simulate_timeout_s") c.timeouts.simulate_s = v.get<double>();
      else if (k == "work_root") c.work_root = v.get<std::string>();
      else if (k == "keep_workdirs") c.keep_workdirs = v.get<bool>();
      else if (k == "versions") c.versions = v.get<std::map<std::string, std::string>>();
      else return absl::InvalidArgumentError(StrCat("unknown toolchain config key '", k, "'"));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad toolchain config: ", e.what()));
  }
  return c;
}

json ToolchainConfigToJson(const ToolchainConfig& c) {
  return {{"harness_dir", c.harness_dir.string()},
          {"source_slot", c.source_slot},
          {"compile_cmd", c.compile_cmd},
          {"elaborate_cmd", c.elaborate_cmd},
          {"simulate_cmd", c.simulate_cmd},
          {"output_name", c.output_name},
          {"testbench_name", c.testbench_name},
          {"pass_sentinel", c.pass_sentinel},
          {"compile_timeout_s", c.timeouts.compile_s},
          {"elaborate_timeout_s", c.timeouts.elaborate_s},
          {"simulate_timeout_s", c.timeouts.simulate_s},
          {"work_root", c.work_root.string()},
          {"keep_workdirs", c.keep_workdirs},
          {"versions", c.versions}};
}

std::vector<std::string> MissingTools(const ToolchainConfig& cfg, bool with_simulator) {
  std::vector<std::string> missing;
  auto check = [&](const std::vector<std::string>& cmd) {
    if (cmd.empty()) return;
    // Relative paths resolve inside the job directory, which does not exist
    // yet, so resolve them against the harness template instead.
    std::string prog = cmd[0];
    if (Contains(prog, "/") && fs::path(prog).is_relative() && !cfg.harness_dir.empty()) {
      prog = (cfg.harness_dir / prog).string();
    }
    if (!FindExecutable(prog) &&
        std::find(missing.begin(), missing.end(), cmd[0]) == missing.end()) {
      missing.push_back(cmd[0]);
    }
  };
  check(cfg.compile_cmd);
  check(cfg.elaborate_cmd);
  if (with_simulator) check(cfg.simulate_cmd);
  return missing;
}

std::string ExtractCode(std::string_view model_output) {
  std::string_view text = model_output;
  size_t think_end = text.rfind("</think>");
  if (think_end != std::string_view::npos) text = text.substr(think_end + 8);
  std::vector<FencedBlock> blocks = FindFencedBlocks(text);
  if (blocks.empty()) return std::string(StripWhitespace(text)) + "\n";
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    std::string info = ToLower(StripWhitespace(it->info));
    if (info.empty() || info == "scala" || info == "chisel") return it->body;
  }
  return blocks.back().body;
}

absl::StatusOr<TopDetection> DetectTopModule(std::string_view code) {
  std::vector<ModuleClass> concrete;
  for (ModuleClass& m : FindModuleClasses(code)) {
    if (m.is_abstract || m.base == "BlackBox" || m.base == "ExtModule") continue;
    concrete.push_back(std::move(m));
  }
  if (concrete.empty()) return absl::NotFoundError("no module class in candidate code");
  TopDetection top;
  top.name = concrete.back().name;
  top.ambiguous = concrete.size() > 1;
  return top;
}

std::vector<StageVerdict> RunJob(const EvalJob& job, const ToolchainConfig& tc) {
  std::vector<StageVerdict> verdicts;
  absl::StatusOr<fs::path> dir = MakeJobDir(tc);
  if (!dir.ok()) {
    verdicts.push_back(Failure(Stage::kCompile, std::string(dir.status().message())));
    return verdicts;
  }
  const fs::path& workdir = *dir;
  auto cleanup = [&] {
    if (tc.keep_workdirs) return;
    std::error_code ec;
    fs::remove_all(workdir, ec);
  };

  fs::path src = workdir / tc.source_slot;
  fs::path out = workdir / tc.output_name;
  fs::path tb = workdir / tc.testbench_name;
  std::string top = job.top_module;
  if (top.empty()) {
    absl::StatusOr<TopDetection> detected = DetectTopModule(job.chisel_code);
    if (detected.ok()) top = detected->name;
  }
  std::map<std::string, std::string> vars = {{"workdir", workdir.string()}, {"top", top},
                                             {"out", out.string()},         {"sv", out.string()},
                                             {"tb", tb.string()},           {"src", src.string()}};

  if (absl::Status st = WritePlain(src, job.chisel_code); !st.ok()) {
    verdicts.push_back(Failure(Stage::kCompile, std::string(st.message())));
    cleanup();
    return verdicts;
  }

  StageRun compile = RunStage(Stage::kCompile, Expand(tc.compile_cmd, vars), workdir,
                              job.timeouts.compile_s);
  verdicts.push_back(compile.verdict);
  if (compile.verdict.status != StageStatus::kPass) {
    cleanup();
    return verdicts;
  }

  if (top.empty()) {
    verdicts.push_back(Failure(Stage::kElaborate, "no module class to elaborate"));
    cleanup();
    return verdicts;
  }
  std::error_code ec;
  fs::create_directories(out.parent_path(), ec);
  fs::remove(out, ec);
  StageRun elab = RunStage(Stage::kElaborate, Expand(tc.elaborate_cmd, vars), workdir,
                           job.timeouts.elaborate_s);
  elab.verdict.diagnostic = FindElabError(elab.stderr_text);
  if (elab.verdict.status == StageStatus::kFail &&
      elab.verdict.diagnostic.starts_with("ctor-args") &&
      DefinesDefaultWrapper(job.chisel_code, top)) {
    std::map<std::string, std::string> retry_vars = vars;
    retry_vars["top"] = StrCat(top, "Default");
    StageRun retry = RunStage(Stage::kElaborate, Expand(tc.elaborate_cmd, retry_vars), workdir,
                              job.timeouts.elaborate_s);
    retry.verdict.diagnostic = FindElabError(retry.stderr_text);
    retry.verdict.wall_time_s += elab.verdict.wall_time_s;
    elab = std::move(retry);
  }
  if (elab.verdict.status == StageStatus::kPass) {
    std::string sv = ReadOrEmpty(out);
    if (!Contains(sv, StrCat("module ", top))) {
      elab.verdict.status = StageStatus::kFail;
      StrAppend(&elab.verdict.log_excerpt, elab.verdict.log_excerpt.empty() ? "" : "\n",
                fs::exists(out) ? StrCat("emitted SystemVerilog lacks 'module ", top, "'")
                                : StrCat("no SystemVerilog written to ", tc.output_name));
    }
  }
  verdicts.push_back(elab.verdict);
  if (elab.verdict.status != StageStatus::kPass || !job.testbench.has_value()) {
    cleanup();
    return verdicts;
  }

  if (absl::Status st = WritePlain(tb, *job.testbench); !st.ok()) {
    verdicts.push_back(Failure(Stage::kSimulate, std::string(st.message())));
    cleanup();
    return verdicts;
  }
  StageRun sim = RunStage(Stage::kSimulate, Expand(tc.simulate_cmd, vars), workdir,
                          job.timeouts.simulate_s);
  if (sim.verdict.status == StageStatus::kPass && !Contains(sim.stdout_text, tc.pass_sentinel)) {
    sim.verdict.status = StageStatus::kFail;
    StrAppend(&sim.verdict.log_excerpt, sim.verdict.log_excerpt.empty() ? "" : "\n",
              "pass sentinel '", tc.pass_sentinel, "' not printed");
  }
  verdicts.push_back(sim.verdict);
  cleanup();
  return verdicts;
}

std::vector<std::vector<StageVerdict>> RunJobs(const std::vector<EvalJob>& jobs,
                                               const ToolchainConfig& toolchain,
                                               int parallelism) {
  std::vector<std::vector<StageVerdict>> results(jobs.size());
  ParallelFor(jobs.size(), parallelism,
              [&](size_t i) { results[i] = RunJob(jobs[i], toolchain); });
  return results;
}

}  // namespace forge::eval
