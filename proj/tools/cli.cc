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

#include "forge/cli/cli.h"

#include <unistd.h>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "forge/cli/config.h"
#include "forge/cli/manifest.h"
#include "forge/common/files.h"
#include "forge/common/parallel.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"
#include "forge/corpus/corpus.h"
#include "forge/dataset/dataset.h"
#include "forge/distill/distill.h"
#include "forge/distill/prompts.h"
#include "forge/docindex/docindex.h"
#include "forge/eval/completions.h"
#include "forge/eval/harness.h"
#include "forge/eval/metrics.h"
#include "forge/judge/judge.h"
#include "forge/llm/annotator.h"
#include "forge/llm/client.h"
#include "spdlog/sinks/ostream_sink.h"
#include "spdlog/spdlog.h"

namespace forge::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string cache_dir;
  bool dry_run = false;
  bool json = false;
  bool quiet = false;
  int verbose = 0;
};

// What a subcommand hands back: a machine-readable summary, the text shown
// without --json, and the files it wrote.
struct Outcome {
  json summary = json::object();
  std::string text;
  fs::path primary_output;
  std::vector<fs::path> artifacts;
};

struct Context {
  GlobalOptions global;
  ForgeConfig config;
  std::string command_line;
};

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kCancelled:
      return kExitUserError;
    default:
      return kExitEnvError;
  }
}

absl::Status RequireInput(const fs::path& path) {
  if (path.empty()) return absl::InvalidArgumentError("input path is empty");
  if (!fs::exists(path)) return absl::NotFoundError(StrCat("input not found: ", path.string()));
  return absl::OkStatus();
}

fs::path Sibling(const fs::path& input, std::string_view suffix) {
  return input.parent_path() / StrCat(input.stem().string(), suffix);
}

std::string PlanText(const std::vector<std::string>& lines) {
  std::string out = "plan (dry run, nothing written):\n";
  for (const std::string& l : lines) StrAppend(&out, "  ", l, "\n");
  return out;
}

absl::StatusOr<std::unique_ptr<llm::ChatClient>> ClientFor(const Context& ctx,
                                                           const std::string& role) {
  const llm::LlmConfig& cfg = ctx.config.llm.at(role);
  absl::StatusOr<std::unique_ptr<llm::ChatClient>> client = llm::MakeClient(cfg);
  if (!client.ok()) {
    return absl::Status(client.status().code(),
                        StrCat("cannot set up ", role, " model: ", client.status().message()));
  }
  return client;
}

std::map<std::string, std::string> ToolVersions(const Context& ctx) {
  std::map<std::string, std::string> v = {{"forge", kForgeVersion},
                                          {"compiler", __VERSION__}};
  for (const auto& [name, version] : ctx.config.toolchain.versions) v[name] = version;
  return v;
}

// ---------------------------------------------------------------------------
// corpus ingest

struct IngestOptions {
  std::string root;
  std::string lang;
  std::string task;
  std::string out;
  std::string provenance;
  int threads = 0;
};

absl::StatusOr<Outcome> RunIngest(Context& ctx, const IngestOptions& opt) {
  FORGE_RETURN_IF_ERROR(RequireInput(opt.root));
  FORGE_ASSIGN_OR_RETURN(corpus::Language lang, corpus::ParseLanguage(opt.lang));
  if (lang == corpus::Language::kOther) {
    return absl::InvalidArgumentError("--lang must be chisel or verilog");
  }
  corpus::TaskKind task = lang == corpus::Language::kChisel ? corpus::TaskKind::kCompletion
                                                            : corpus::TaskKind::kDecompile;
  if (!opt.task.empty()) {
    FORGE_ASSIGN_OR_RETURN(task, corpus::ParseTask(opt.task));
  }
  corpus::FilterConfig filter = ctx.config.filter;
  if (opt.threads > 0) filter.threads = opt.threads;
  FORGE_RETURN_IF_ERROR(corpus::ValidateFilterConfig(filter));

  FORGE_ASSIGN_OR_RETURN(corpus::IngestResult ingested, corpus::Ingest(opt.root, lang));
  corpus::FilterResult filtered = corpus::Filter(ingested.files, filter);

  Outcome o;
  o.summary["ingested"] = ingested.files.size();
  o.summary["skipped"] = ingested.skipped;
  o.summary["filter"] = corpus::FilterReportToJson(filtered.report);
  o.summary["task"] = corpus::TaskName(task);
  const llm::LlmConfig& annot = ctx.config.llm.at("annotator");
  if (ctx.global.dry_run) {
    std::vector<std::string> plan = {
        StrCat("ingest ", ingested.files.size(), " ", corpus::LanguageName(lang), " files from ",
               opt.root, " (", ingested.skipped.size(), " skipped)"),
        StrCat("filter keeps ", filtered.report.kept, ", rejects ", filtered.report.rejected()),
        task == corpus::TaskKind::kCompletion
            ? StrCat("annotate ", filtered.report.kept, " files with ", annot.provider,
                     " model '", annot.model_name, "'")
            : std::string("decompile samples pass Verilog through unchanged"),
        StrCat("write ", filtered.report.kept, " ", corpus::TaskName(task), " samples to ",
               opt.out)};
    o.summary["plan"] = plan;
    o.text = PlanText(plan);
    return o;
  }

  std::unique_ptr<llm::ChatClient> client;
  std::unique_ptr<llm::LlmAnnotationClient> annotator;
  if (task == corpus::TaskKind::kCompletion && !filtered.kept.empty()) {
    FORGE_ASSIGN_OR_RETURN(client, ClientFor(ctx, "annotator"));
    annotator = std::make_unique<llm::LlmAnnotationClient>(*client, annot.model_name,
                                                           annot.temperature,
                                                           annot.max_output_tokens);
  }
  std::string provenance =
      opt.provenance.empty() ? fs::path(opt.root).filename().string() : opt.provenance;
  corpus::BaseSampleBuilder builder(annotator.get(), provenance);
  FORGE_ASSIGN_OR_RETURN(corpus::BaseSampleBatch batch,
                         builder.BuildAll(filtered.kept, task, annot.parallelism));
  std::vector<json> lines;
  for (const corpus::CodeSample& s : batch.samples) lines.push_back(corpus::SampleToJson(s));
  FORGE_RETURN_IF_ERROR(WriteJsonl(opt.out, lines));

  o.summary["samples"] = batch.samples.size();
  o.summary["degraded"] = batch.degraded;
  o.primary_output = opt.out;
  o.artifacts = {opt.out};
  const corpus::FilterReport& r = filtered.report;
  o.text = StrCat("ingested ", ingested.files.size(), " files (", ingested.skipped.size(),
                  " skipped)\n", "filter: kept ", r.kept, ", banned ", r.banned,
                  ", not chisel3 ", r.not_chisel3, ", too short ", r.too_short, ", too long ",
                  r.too_long, ", too few tokens ", r.too_few_tokens, ", too many tokens ",
                  r.too_many_tokens, ", duplicates ", r.duplicates, "\n", "wrote ",
                  batch.samples.size(), " ", corpus::TaskName(task), " samples to ", opt.out,
                  batch.degraded.empty() ? "" : StrCat(" (", batch.degraded.size(), " degraded)"),
                  "\n");
  return o;
}

// ---------------------------------------------------------------------------
// docs build

struct DocsOptions {
  std::string root;
  std::string out;
};

absl::StatusOr<Outcome> RunDocsBuild(Context& ctx, const DocsOptions& opt) {
  FORGE_RETURN_IF_ERROR(RequireInput(opt.root));
  FORGE_ASSIGN_OR_RETURN(docindex::DocIndex index, docindex::BuildIndex(opt.root, ctx.config.docs));
  Outcome o;
  o.summary["fragments"] = index.size();
  if (ctx.global.dry_run) {
    std::vector<std::string> plan = {
        StrCat("split documentation under ", opt.root, " into ", index.size(), " fragments"),
        StrCat("write index to ", opt.out)};
    o.summary["plan"] = plan;
    o.text = PlanText(plan);
    return o;
  }
  FORGE_RETURN_IF_ERROR(WriteJsonl(opt.out, index.ToJsonl()));
  o.primary_output = opt.out;
  o.artifacts = {opt.out};
  o.text = StrCat("indexed ", index.size(), " fragments into ", opt.out, "\n");
  return o;
}

// ---------------------------------------------------------------------------
// distill

struct DistillOptions {
  std::string samples;
  std::string docs;
  std::string out;
  std::string rejected;
  std::string templates;
  std::string task;
  int retry_rejected = -1;
};

absl::StatusOr<Outcome> RunDistill(Context& ctx, const DistillOptions& opt) {
  FORGE_RETURN_IF_ERROR(RequireInput(opt.samples));
  if (!opt.docs.empty()) FORGE_RETURN_IF_ERROR(RequireInput(opt.docs));
  distill::DistillConfig cfg = ctx.config.distill;
  if (opt.retry_rejected >= 0) cfg.retry_rejected = opt.retry_rejected;
  const llm::LlmConfig& teacher_cfg = ctx.config.llm.at("teacher");
  if (cfg.teacher_model.empty()) cfg.teacher_model = teacher_cfg.model_name;
  if (cfg.teacher_model.empty()) {
    return absl::FailedPreconditionError("no teacher model configured (llm.teacher.model_name)");
  }

  fs::path templates_dir = opt.templates.empty() ? ctx.config.templates_dir : fs::path(opt.templates);
  distill::PromptTemplates templates = distill::PromptTemplates::Defaults();
  if (!templates_dir.empty()) {
    FORGE_RETURN_IF_ERROR(RequireInput(templates_dir));
    FORGE_ASSIGN_OR_RETURN(templates, distill::PromptTemplates::Load(templates_dir));
  }
  FORGE_ASSIGN_OR_RETURN(std::vector<corpus::CodeSample> samples,
                         corpus::ReadSamples(opt.samples));
  if (!opt.task.empty()) {
    FORGE_ASSIGN_OR_RETURN(distill::DistillTask only, distill::ParseDistillTask(opt.task));
    corpus::TaskKind kind = only == distill::DistillTask::kSpecToChisel
                                ? corpus::TaskKind::kCompletion
                                : corpus::TaskKind::kDecompile;
    std::erase_if(samples, [&](const corpus::CodeSample& s) { return s.task != kind; });
  }
  std::optional<docindex::DocIndex> index;
  if (!opt.docs.empty()) {
    FORGE_ASSIGN_OR_RETURN(docindex::DocIndex loaded, docindex::DocIndex::Load(opt.docs));
    index = std::move(loaded);
  }
  size_t s2c = 0;
  for (const corpus::CodeSample& s : samples) s2c += s.task == corpus::TaskKind::kCompletion;
  fs::path rejected_path = opt.rejected.empty() ? Sibling(opt.out, ".rejected.jsonl")
                                                : fs::path(opt.rejected);

  Outcome o;
  o.summary["samples"] = samples.size();
  o.summary["s2c"] = s2c;
  o.summary["d2c"] = samples.size() - s2c;
  if (ctx.global.dry_run) {
    std::vector<std::string> plan = {
        StrCat("distill ", samples.size(), " samples (", s2c, " spec-to-chisel, ",
               samples.size() - s2c, " decompile-to-chisel) with teacher '", cfg.teacher_model,
               "'"),
        index ? StrCat("match spec-to-chisel samples against ", index->size(), " doc fragments")
              : std::string("no documentation index, spec-to-chisel prompts carry no docs"),
        StrCat("retry rejected traces up to ", cfg.retry_rejected, " times"),
        StrCat("write accepted examples to ", opt.out, ", rejected to ",
               rejected_path.string())};
    o.summary["plan"] = plan;
    o.text = PlanText(plan);
    return o;
  }

  FORGE_ASSIGN_OR_RETURN(std::unique_ptr<llm::ChatClient> teacher, ClientFor(ctx, "teacher"));
  std::vector<distill::GuidanceBundle> bundles(samples.size());
  std::vector<std::string> doc_warnings;
  std::unique_ptr<llm::ChatClient> annot_client;
  std::unique_ptr<llm::LlmAnnotationClient> annotator;
  if (index && s2c > 0) {
    const llm::LlmConfig& a = ctx.config.llm.at("annotator");
    FORGE_ASSIGN_OR_RETURN(annot_client, ClientFor(ctx, "annotator"));
    annotator = std::make_unique<llm::LlmAnnotationClient>(*annot_client, a.model_name,
                                                           a.temperature, a.max_output_tokens);
  }
  std::mutex warn_mu;
  ParallelFor(samples.size(), cfg.parallelism, [&](size_t i) {
    const corpus::CodeSample& s = samples[i];
    if (s.task == corpus::TaskKind::kDecompile) {
      bundles[i] = distill::MakeD2CBundle(templates.feature_catalog);
      return;
    }
    std::vector<docindex::DocFragment> docs;
    if (annotator) {
      absl::StatusOr<docindex::MatchResult> m = docindex::AnnotateAndMatch(s, *index, *annotator);
      if (m.ok() && !m->degraded) {
        docs = docindex::SelectContextDocs(m->matches, *index, cfg.max_docs);
      } else {
        std::lock_guard<std::mutex> lock(warn_mu);
        doc_warnings.push_back(StrCat(s.id, ": doc matching degraded, no docs attached"));
      }
    }
    bundles[i] = distill::MakeS2CBundle(std::move(docs), s.source_code);
  });
  for (const std::string& w : doc_warnings) spdlog::warn("{}", w);

  distill::Distiller distiller(*teacher, templates, cfg);
  std::vector<absl::StatusOr<distill::DistilledExample>> results =
      distiller.SynthesizeAll(samples, bundles);
  std::vector<json> accepted;
  std::vector<json> rejected;
  std::map<std::string, int> reasons;
  for (size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok()) {
      json r = {{"sample_id", samples[i].id},
                {"validation", {{"accepted", false}, {"reason", "prompt"}}},
                {"error", std::string(results[i].status().message())}};
      rejected.push_back(std::move(r));
      ++reasons["prompt"];
      continue;
    }
    json j = distill::ExampleToJson(*results[i]);
    if (results[i]->validation.accepted) {
      accepted.push_back(std::move(j));
    } else {
      ++reasons[results[i]->validation.reason];
      rejected.push_back(std::move(j));
    }
  }
  FORGE_RETURN_IF_ERROR(WriteJsonl(opt.out, accepted));
  FORGE_RETURN_IF_ERROR(WriteJsonl(rejected_path, rejected));
  o.summary["accepted"] = accepted.size();
  o.summary["rejected"] = rejected.size();
  o.summary["reject_reasons"] = reasons;
  o.summary["teacher_calls"] = teacher->attempts();
  o.primary_output = opt.out;
  o.artifacts = {opt.out, rejected_path};
  o.text = StrCat("accepted ", accepted.size(), ", rejected ", rejected.size(), "\n");
  for (const auto& [reason, n] : reasons) StrAppend(&o.text, "  ", reason, ": ", n, "\n");
  StrAppend(&o.text, "wrote ", opt.out, " and ", rejected_path.string(), "\n");
  return o;
}

// ---------------------------------------------------------------------------
// dataset mix / stats

struct MixOptions {
  std::string completion;
  std::string decompile;
  std::string ratio;
  std::string name;
  std::optional<size_t> total;
  std::optional<uint64_t> seed;
  std::string out;
  bool chat = false;
};

absl::StatusOr<Outcome> RunMix(Context& ctx, const MixOptions& opt) {
  dataset::MixOptions mix;
  mix.ratio = ctx.config.dataset.ratio;
  mix.seed = opt.seed.value_or(ctx.config.dataset.seed);
  mix.name = opt.name.empty() ? ctx.config.dataset.name : opt.name;
  if (!opt.ratio.empty()) {
    FORGE_ASSIGN_OR_RETURN(mix.ratio, dataset::ParseRatio(opt.ratio));
  }
  if (!opt.total) return absl::InvalidArgumentError("--total is required");
  mix.total = *opt.total;

  bool have_inputs = !opt.completion.empty() || !opt.decompile.empty();
  if (have_inputs || !ctx.global.dry_run) {
    if (opt.completion.empty() || opt.decompile.empty()) {
      return absl::InvalidArgumentError("--completion and --decompile are both required");
    }
    FORGE_RETURN_IF_ERROR(RequireInput(opt.completion));
    FORGE_RETURN_IF_ERROR(RequireInput(opt.decompile));
  }
  if (!ctx.global.dry_run && opt.out.empty()) return absl::InvalidArgumentError("--out is required");

  Outcome o;
  if (ctx.global.dry_run) {
    auto [cq, dq] = dataset::SplitQuota(mix.total, mix.ratio);
    std::vector<std::string> plan = {StrCat("quota ", cq, " + ", dq, " (completion + decompile) = ",
                                            mix.total, ", seed ", mix.seed)};
    if (have_inputs) {
      FORGE_ASSIGN_OR_RETURN(std::vector<json> c, ReadJsonl(opt.completion));
      FORGE_ASSIGN_OR_RETURN(std::vector<json> d, ReadJsonl(opt.decompile));
      FORGE_ASSIGN_OR_RETURN(dataset::DatasetManifest m, dataset::PlanMix(c.size(), d.size(), mix));
      plan.push_back(StrCat("pools ", c.size(), " + ", d.size(), ", shortfall ",
                            m.completion_shortfall, " + ", m.decompile_shortfall));
      o.summary["dataset_manifest"] = dataset::ManifestToJson(m);
    }
    if (!opt.out.empty()) plan.push_back(StrCat("write mixed dataset to ", opt.out));
    o.summary["completion_quota"] = cq;
    o.summary["decompile_quota"] = dq;
    o.summary["plan"] = plan;
    o.text = PlanText(plan);
    return o;
  }

  FORGE_ASSIGN_OR_RETURN(dataset::MixResult result, dataset::Mix(opt.completion, opt.decompile, mix));
  std::string body;
  for (const std::string& line : result.lines) {
    if (opt.chat) {
      StrAppend(&body, dataset::ToChatRecord(json::parse(line)).dump(), "\n");
    } else {
      StrAppend(&body, line, "\n");
    }
  }
  FORGE_RETURN_IF_ERROR(WriteFileAtomic(opt.out, body));
  fs::path manifest_path = Sibling(opt.out, ".dataset.json");
  json manifest = dataset::ManifestToJson(result.manifest);
  FORGE_RETURN_IF_ERROR(WriteFileAtomic(manifest_path, manifest.dump(2) + "\n"));
  const dataset::DatasetManifest& m = result.manifest;
  for (const std::string& w : m.warnings) spdlog::warn("{}", w);
  o.summary["dataset_manifest"] = manifest;
  o.primary_output = opt.out;
  o.artifacts = {opt.out, manifest_path};
  o.text = StrCat("mixed ", m.completion_taken, " + ", m.decompile_taken,
                  " (completion + decompile) records into ", opt.out, "\n");
  if (m.completion_shortfall + m.decompile_shortfall > 0) {
    StrAppend(&o.text, "shortfall ", m.completion_shortfall, " + ", m.decompile_shortfall, "\n");
  }
  return o;
}

struct StatsOptions {
  std::string in;
  std::string out;
};

absl::StatusOr<Outcome> RunStats(Context& ctx, const StatsOptions& opt) {
  FORGE_RETURN_IF_ERROR(RequireInput(opt.in));
  FORGE_ASSIGN_OR_RETURN(dataset::TokenStats stats, dataset::Stats(opt.in));
  Outcome o;
  o.summary = dataset::TokenStatsToJson(stats);
  o.text = fmt::format("records {}  mean {:.1f}  median {:.1f}  p95 {:.0f}  max {:.0f} tokens\n",
                       stats.count, stats.mean, stats.median, stats.p95, stats.max);
  if (!opt.out.empty()) {
    if (ctx.global.dry_run) {
      o.text += PlanText({StrCat("write token statistics to ", opt.out)});
      return o;
    }
    FORGE_RETURN_IF_ERROR(WriteFileAtomic(opt.out, o.summary.dump(2) + "\n"));
    o.primary_output = opt.out;
    o.artifacts = {opt.out};
  }
  return o;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string in;
  std::string out;
  std::string k;
  std::string label;
  int jobs = 0;
  bool keep_workdirs = false;
};

absl::StatusOr<Outcome> RunEval(Context& ctx, const EvalOptions& opt) {
  FORGE_RETURN_IF_ERROR(RequireInput(opt.in));
  EvalSettings settings = ctx.config.eval;
  if (!opt.k.empty()) {
    FORGE_ASSIGN_OR_RETURN(settings.ks, ParseKList(opt.k));
  }
  if (opt.jobs > 0) settings.jobs = opt.jobs;
  if (!opt.label.empty()) settings.label = opt.label;
  eval::ToolchainConfig tc = ctx.config.toolchain;
  if (opt.keep_workdirs) tc.keep_workdirs = true;
  FORGE_RETURN_IF_ERROR(tc.Validate());

  FORGE_ASSIGN_OR_RETURN(std::vector<eval::CompletionRecord> records,
                         eval::ReadCompletions(opt.in));
  for (eval::CompletionRecord& r : records) {
    if (static_cast<int>(r.completions.size()) > settings.samples_per_problem) {
      spdlog::warn("{}: using the first {} of {} completions", r.problem_id,
                   settings.samples_per_problem, r.completions.size());
      r.completions.resize(settings.samples_per_problem);
    }
    for (int k : settings.ks) {
      if (static_cast<int>(r.completions.size()) < k) {
        return absl::InvalidArgumentError(StrCat("problem '", r.problem_id, "' has ",
                                                 r.completions.size(),
                                                 " completions, fewer than k=", k));
      }
    }
  }
  bool any_tb = std::any_of(records.begin(), records.end(),
                            [](const eval::CompletionRecord& r) { return r.testbench.has_value(); });
  std::vector<std::string> missing = eval::MissingTools(tc, false);
  std::vector<std::string> missing_sim;
  if (any_tb) {
    for (const std::string& t : eval::MissingTools(tc, true)) {
      if (std::find(missing.begin(), missing.end(), t) == missing.end()) missing_sim.push_back(t);
    }
  }
  fs::path out = opt.out.empty() ? Sibling(opt.in, ".verdicts.jsonl") : fs::path(opt.out);
  eval::JobPlan plan = eval::BuildJobs(records, tc.timeouts);

  Outcome o;
  o.summary["problems"] = records.size();
  o.summary["jobs"] = plan.jobs.size();
  if (ctx.global.dry_run) {
    std::vector<std::string> lines = {
        StrCat("evaluate ", plan.jobs.size(), " completions of ", records.size(),
               " problems on ", settings.jobs, " workers"),
        StrCat("report P@k for k=", StrJoin(settings.ks, ","), " and Syn(%) by elaborate-pass"),
        missing.empty() ? std::string("compile and elaborate tools found")
                        : StrCat("missing tools: ", StrJoin(missing, ", ")),
        StrCat("write verdicts to ", out.string())};
    if (!missing_sim.empty()) {
      lines.push_back(StrCat("simulator missing (", StrJoin(missing_sim, ", "),
                             "), simulate stages would report tool-missing"));
    }
    o.summary["missing_tools"] = missing;
    o.summary["plan"] = lines;
    o.text = PlanText(lines);
    return o;
  }
  if (!missing.empty()) {
    return absl::UnavailableError(StrCat("toolchain not found: ", StrJoin(missing, ", ")));
  }
  for (const std::string& t : missing_sim) {
    spdlog::warn("simulator '{}' not found, simulate stages will report tool-missing", t);
  }

  std::vector<std::vector<eval::StageVerdict>> verdicts =
      eval::RunJobs(plan.jobs, tc, settings.jobs);
  std::vector<json> lines;
  for (size_t i = 0; i < plan.jobs.size(); ++i) {
    lines.push_back(eval::JobVerdictsToJson(plan.jobs[i], verdicts[i]));
  }
  FORGE_RETURN_IF_ERROR(WriteJsonl(out, lines));
  std::vector<eval::ProblemResult> results = eval::TallyAll(records, plan.jobs, verdicts);
  FORGE_ASSIGN_OR_RETURN(eval::EvalReport report, eval::Aggregate(results, settings.ks));
  std::string table = eval::RenderReport(report, settings.label);
  fs::path report_txt = Sibling(out, ".report.txt");
  fs::path report_json = Sibling(out, ".report.json");
  json rj = eval::ReportToJson(report);
  rj["label"] = settings.label;
  json per_problem = json::array();
  for (const eval::ProblemResult& r : results) {
    per_problem.push_back({{"problem_id", r.problem_id}, {"n", r.n}, {"c_syntax", r.c_syntax},
                           {"c_functional", r.c_functional},
                           {"functional_evaluated", r.functional_evaluated}});
  }
  rj["per_problem"] = per_problem;
  FORGE_RETURN_IF_ERROR(WriteFileAtomic(report_txt, table));
  FORGE_RETURN_IF_ERROR(WriteFileAtomic(report_json, rj.dump(2) + "\n"));
  o.summary = rj;
  o.text = table;
  o.primary_output = out;
  o.artifacts = {out, report_txt, report_json};
  return o;
}

// ---------------------------------------------------------------------------
// judge

struct JudgeOptions {
  std::string in;
  std::string rubric;
  std::string out;
  std::string baselines;
  std::string label;
  int repeats = 0;
  std::optional<double> threshold;
};

absl::StatusOr<Outcome> RunJudge(Context& ctx, const JudgeOptions& opt) {
  FORGE_RETURN_IF_ERROR(RequireInput(opt.in));
  judge::JudgeConfig cfg = ctx.config.judge;
  if (opt.repeats > 0) cfg.repeats = opt.repeats;
  if (opt.threshold) cfg.variance_threshold = *opt.threshold;
  if (cfg.judge_model.empty()) cfg.judge_model = ctx.config.llm.at("judge").model_name;
  if (cfg.generator_model.empty()) cfg.generator_model = ctx.config.llm.at("generator").model_name;
  FORGE_RETURN_IF_ERROR(cfg.Validate());
  std::string rubric(judge::DefaultRubric());
  if (!opt.rubric.empty()) {
    FORGE_RETURN_IF_ERROR(RequireInput(opt.rubric));
    FORGE_ASSIGN_OR_RETURN(rubric, ReadFile(opt.rubric));
  }
  if (StripWhitespace(rubric).empty()) return absl::InvalidArgumentError("rubric is empty");
  FORGE_ASSIGN_OR_RETURN(std::vector<eval::CompletionRecord> records,
                         eval::ReadCompletions(opt.in));
  size_t attempts = 0;
  for (const eval::CompletionRecord& r : records) {
    if (StripWhitespace(r.prompt).empty()) {
      return absl::InvalidArgumentError(
          StrCat("problem '", r.problem_id, "' has an empty prompt, nothing to build baselines from"));
    }
    attempts += r.completions.size();
  }
  fs::path out = opt.out.empty() ? Sibling(opt.in, ".judge.jsonl") : fs::path(opt.out);
  fs::path baseline_dir =
      opt.baselines.empty() ? out.parent_path() / "baselines" : fs::path(opt.baselines);
  std::string label = opt.label.empty() ? ctx.config.eval.label : opt.label;

  Outcome o;
  o.summary["problems"] = records.size();
  o.summary["attempts"] = attempts;
  if (ctx.global.dry_run) {
    std::vector<std::string> plan = {
        StrCat("baseline variants for ", records.size(), " problems from '", cfg.generator_model,
               "', cached in ", baseline_dir.string()),
        StrCat("judge ", attempts, " attempts x ", cfg.repeats, " repeats with '",
               cfg.judge_model, "' at temperature ", cfg.temperature),
        StrCat("filter records with stdev > ", cfg.variance_threshold),
        StrCat("write records to ", out.string())};
    o.summary["plan"] = plan;
    o.text = PlanText(plan);
    return o;
  }

  FORGE_ASSIGN_OR_RETURN(std::unique_ptr<llm::ChatClient> generator, ClientFor(ctx, "generator"));
  FORGE_ASSIGN_OR_RETURN(std::unique_ptr<llm::ChatClient> judge_client, ClientFor(ctx, "judge"));
  judge::BaselineStore store(baseline_dir);
  std::vector<judge::JudgeTask> tasks;
  for (const eval::CompletionRecord& r : records) {
    absl::StatusOr<std::vector<judge::DeclaredVariant>> baselines =
        judge::GenerateBaselineVariants(r.prompt, *generator, cfg, store);
    if (!baselines.ok()) {
      // Baselines are mandatory: without them scores are not comparable.
      return absl::UnavailableError(
          StrCat("problem '", r.problem_id, "': ", baselines.status().message()));
    }
    for (size_t i = 0; i < r.completions.size(); ++i) {
      judge::JudgeTask t;
      t.problem_id = r.problem_id;
      t.attempt_index = static_cast<int>(i);
      t.spec_text = r.prompt;
      t.candidate_code = eval::ExtractCode(r.completions[i]);
      t.baseline_variants = *baselines;
      t.rubric = rubric;
      tasks.push_back(std::move(t));
    }
  }
  FORGE_ASSIGN_OR_RETURN(std::vector<judge::JudgeRecord> judged,
                         judge::ScoreAll(tasks, *judge_client, cfg));
  std::vector<json> lines;
  for (const judge::JudgeRecord& r : judged) lines.push_back(judge::RecordToJson(r));
  FORGE_RETURN_IF_ERROR(WriteJsonl(out, lines));
  FORGE_ASSIGN_OR_RETURN(judge::JudgeSummary summary, judge::AggregateScores(judged));
  fs::path summary_path = Sibling(out, ".summary.json");
  json sj = judge::SummaryToJson(summary, cfg);
  sj["label"] = label;
  FORGE_RETURN_IF_ERROR(WriteFileAtomic(summary_path, sj.dump(2) + "\n"));
  o.summary = sj;
  o.text = judge::RenderSummary(summary, cfg, label);
  o.primary_output = out;
  o.artifacts = {out, summary_path};
  return o;
}

// ---------------------------------------------------------------------------

std::string JoinArgs(const std::vector<std::string>& args) {
  std::string out;
  for (const std::string& a : args) {
    if (!out.empty()) out += ' ';
    bool plain = !a.empty() && a.find_first_of(" \t\"'\\$") == std::string::npos;
    out += plain ? a : StrCat("'", a, "'");
  }
  return out;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  // Logs go to the diagnostic stream so reports on `out` stay machine-readable.
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto logger = std::make_shared<spdlog::logger>("forge", sink);
  logger->set_pattern("[%l] %v");
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);
  struct RestoreLogger {
    std::shared_ptr<spdlog::logger> prev;
    ~RestoreLogger() { spdlog::set_default_logger(prev); }
  } restore{previous};

  Context ctx;
  ctx.command_line = JoinArgs(args);
  CLI::App app{"forge: HDL dataset construction and Chisel evaluation toolkit", "forge"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", kForgeVersion);
  app.add_option("--config", ctx.global.config_path, "Shared JSON configuration file");
  app.add_option("--cache-dir", ctx.global.cache_dir, "Response cache directory for all models");
  app.add_flag("--dry-run", ctx.global.dry_run, "Validate inputs and print the plan only");
  app.add_flag("--json", ctx.global.json, "Print machine-readable JSON");
  app.add_flag("-q,--quiet", ctx.global.quiet, "Only log warnings and errors");
  app.add_flag("-v,--verbose", ctx.global.verbose, "More logging");

  std::function<absl::StatusOr<Outcome>()> action;
  std::string subcommand;

  CLI::App* corpus_cmd = app.add_subcommand("corpus", "Corpus ingestion and filtering");
  corpus_cmd->require_subcommand(1);
  IngestOptions ingest;
  CLI::App* ingest_cmd = corpus_cmd->add_subcommand("ingest", "Ingest, filter and build samples");
  ingest_cmd->add_option("--root", ingest.root, "Directory tree or JSONL dump")->required();
  ingest_cmd->add_option("--lang", ingest.lang, "chisel or verilog")->required();
  ingest_cmd->add_option("--task", ingest.task, "completion or decompile");
  ingest_cmd->add_option("--out", ingest.out, "Samples JSONL")->required();
  ingest_cmd->add_option("--provenance", ingest.provenance, "Source corpus name");
  ingest_cmd->add_option("--threads", ingest.threads, "Filter worker threads");
  ingest_cmd->callback([&] {
    subcommand = "corpus ingest";
    action = [&] { return RunIngest(ctx, ingest); };
  });

  CLI::App* docs_cmd = app.add_subcommand("docs", "Documentation index");
  docs_cmd->require_subcommand(1);
  DocsOptions docs;
  CLI::App* docs_build = docs_cmd->add_subcommand("build", "Split markdown into a chapter index");
  docs_build->add_option("--root", docs.root, "Markdown documentation root")->required();
  docs_build->add_option("--out", docs.out, "Index JSONL")->required();
  docs_build->callback([&] {
    subcommand = "docs build";
    action = [&] { return RunDocsBuild(ctx, docs); };
  });

  DistillOptions distill_opt;
  CLI::App* distill_cmd = app.add_subcommand("distill", "Synthesize reasoning traces");
  distill_cmd->add_option("--samples,--in", distill_opt.samples, "Samples JSONL")->required();
  distill_cmd->add_option("--docs", distill_opt.docs, "Documentation index JSONL");
  distill_cmd->add_option("--out", distill_opt.out, "Accepted examples JSONL")->required();
  distill_cmd->add_option("--rejected", distill_opt.rejected, "Rejected examples JSONL");
  distill_cmd->add_option("--templates", distill_opt.templates, "Prompt template directory");
  distill_cmd->add_option("--task", distill_opt.task, "Only this task: s2c or d2c");
  distill_cmd->add_option("--retry-rejected", distill_opt.retry_rejected,
                          "Extra teacher calls per rejected trace");
  distill_cmd->callback([&] {
    subcommand = "distill";
    action = [&] { return RunDistill(ctx, distill_opt); };
  });

  CLI::App* dataset_cmd = app.add_subcommand("dataset", "Dataset assembly");
  dataset_cmd->require_subcommand(1);
  MixOptions mix;
  CLI::App* mix_cmd = dataset_cmd->add_subcommand("mix", "Mix completion and decompile examples");
  mix_cmd->add_option("--completion", mix.completion, "Completion-task examples JSONL");
  mix_cmd->add_option("--decompile", mix.decompile, "Decompile-task examples JSONL");
  mix_cmd->add_option("--ratio", mix.ratio, "completion:decompile, e.g. 3:7");
  mix_cmd->add_option("--total", mix.total, "Records in the mixed dataset");
  mix_cmd->add_option("--seed", mix.seed, "Sampling seed");
  mix_cmd->add_option("--name", mix.name, "Dataset name");
  mix_cmd->add_option("--out", mix.out, "Mixed dataset JSONL");
  mix_cmd->add_flag("--chat", mix.chat, "Emit bare {messages} chat records");
  mix_cmd->callback([&] {
    subcommand = "dataset mix";
    action = [&] { return RunMix(ctx, mix); };
  });
  StatsOptions stats;
  CLI::App* stats_cmd = dataset_cmd->add_subcommand("stats", "Token statistics of a dataset");
  stats_cmd->add_option("--in", stats.in, "Examples JSONL")->required();
  stats_cmd->add_option("--out", stats.out, "Statistics JSON");
  stats_cmd->callback([&] {
    subcommand = "dataset stats";
    action = [&] { return RunStats(ctx, stats); };
  });

  EvalOptions eval_opt;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Compile, elaborate and simulate completions");
  eval_cmd->add_option("--in", eval_opt.in, "Completions JSONL")->required();
  eval_cmd->add_option("--out", eval_opt.out, "Verdicts JSONL");
  eval_cmd->add_option("--k", eval_opt.k, "Comma-separated k values, e.g. 1,5");
  eval_cmd->add_option("--jobs", eval_opt.jobs, "Concurrent jobs");
  eval_cmd->add_option("--label", eval_opt.label, "Model label in the report");
  eval_cmd->add_flag("--keep-workdirs", eval_opt.keep_workdirs, "Keep job directories");
  eval_cmd->callback([&] {
    subcommand = "eval";
    action = [&] { return RunEval(ctx, eval_opt); };
  });

  JudgeOptions judge_opt;
  CLI::App* judge_cmd = app.add_subcommand("judge", "Variability scoring with a judge model");
  judge_cmd->add_option("--in", judge_opt.in, "Completions JSONL")->required();
  judge_cmd->add_option("--rubric", judge_opt.rubric, "Rubric text file");
  judge_cmd->add_option("--repeats", judge_opt.repeats, "Judge calls per attempt");
  judge_cmd->add_option("--threshold", judge_opt.threshold, "Filter stdev threshold");
  judge_cmd->add_option("--out", judge_opt.out, "Judge records JSONL");
  judge_cmd->add_option("--baselines", judge_opt.baselines, "Baseline variant cache directory");
  judge_cmd->add_option("--label", judge_opt.label, "Model label in the summary");
  judge_cmd->callback([&] {
    subcommand = "judge";
    action = [&] { return RunJudge(ctx, judge_opt); };
  });

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::vector<std::string> reversed(rest.rbegin(), rest.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kForgeVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    for (size_t i = 0; i < rest.size(); ++i) {
      const std::string& a = rest[i];
      if (a == "--config" || a == "--cache-dir") {
        ++i;
        continue;
      }
      if (a.empty() || a[0] == '-') continue;
      if (app.get_subcommand_no_throw(a) == nullptr) {
        message = StrCat("unknown subcommand '", a, "'");
      }
      break;
    }
    err << "error: " << message << "\n\n" << app.help();
    return kExitUserError;
  }
  if (!action) {
    err << app.help();
    return kExitUserError;
  }

  if (ctx.global.quiet) {
    logger->set_level(spdlog::level::warn);
  } else if (ctx.global.verbose > 0) {
    logger->set_level(spdlog::level::debug);
  }

  absl::Status status = absl::OkStatus();
  if (!ctx.global.config_path.empty()) {
    absl::StatusOr<ForgeConfig> loaded = LoadConfig(ctx.global.config_path);
    if (loaded.ok()) {
      ctx.config = *std::move(loaded);
    } else {
      status = loaded.status();
    }
  } else {
    ctx.config = DefaultConfig();
  }
  if (status.ok()) {
    ApplyEnvironment(ctx.config);
    if (!ctx.global.cache_dir.empty()) {
      for (auto& [role, l] : ctx.config.llm) l.cache_dir = ctx.global.cache_dir;
    }
  }

  RunManifest manifest;
  manifest.command_line = ctx.command_line;
  manifest.subcommand = subcommand;
  manifest.started_at = UtcNow();
  absl::StatusOr<Outcome> outcome = status.ok() ? action() : absl::StatusOr<Outcome>(status);
  if (!outcome.ok()) {
    if (ctx.global.json) {
      out << json({{"ok", false}, {"error", std::string(outcome.status().message())}}).dump(2)
          << "\n";
    }
    err << "error: " << outcome.status().message() << "\n";
    return ExitCodeFor(outcome.status());
  }
  if (!ctx.global.dry_run && !outcome->primary_output.empty()) {
    manifest.config_hash = ConfigHash(ctx.config);
    manifest.tool_versions = ToolVersions(ctx);
    for (const fs::path& a : outcome->artifacts) {
      if (absl::Status st = AddArtifact(manifest, a); !st.ok()) {
        err << "error: " << st.message() << "\n";
        return kExitEnvError;
      }
    }
    manifest.finished_at = UtcNow();
    if (absl::Status st = WriteManifest(manifest, outcome->primary_output); !st.ok()) {
      err << "error: " << st.message() << "\n";
      return kExitEnvError;
    }
    outcome->summary["manifest"] = ManifestPathFor(outcome->primary_output);
  }
  if (ctx.global.json) {
    json j = outcome->summary;
    if (!j.is_object()) j = json{{"result", j}};
    j["ok"] = true;
    j["dry_run"] = ctx.global.dry_run;
    out << j.dump(2) << "\n";
  } else {
    out << outcome->text;
  }
  return kExitOk;
}

}  // namespace forge::cli
