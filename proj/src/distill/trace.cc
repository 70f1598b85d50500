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

#include "forge/distill/trace.h"

#include <algorithm>
#include <unordered_map>

#include "forge/common/chisel.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"
#include "forge/common/text.h"
#include "forge/common/tokenizer.h"

namespace forge::distill {

using nlohmann::json;

std::string_view VariantName(VariantKind kind) {
  switch (kind) {
    case VariantKind::kConfigurable:
      return "configurable";
    case VariantKind::kFunctional:
      return "functional";
    case VariantKind::kStructural:
      return "structural";
  }
  return "configurable";
}

absl::StatusOr<VariantKind> ParseVariant(std::string_view name) {
  std::string lower = ToLower(StripWhitespace(name));
  if (lower == "configurable" || lower == "configure" || lower == "config") {
    return VariantKind::kConfigurable;
  }
  if (lower == "functional" || lower == "function") return VariantKind::kFunctional;
  if (lower == "structural" || lower == "structure") return VariantKind::kStructural;
  return absl::InvalidArgumentError(StrCat("unknown variant kind '", name, "'"));
}

absl::StatusOr<std::vector<DeclaredVariant>> ParseVariantLines(std::string_view text) {
  std::vector<DeclaredVariant> out;
  for (std::string_view line : SplitLines(text)) {
    std::string_view s = StripWhitespace(line);
    if (s.empty()) continue;
    if (s.starts_with("- ") || s.starts_with("* ")) s.remove_prefix(2);
    std::string lower_head = ToLower(s.substr(0, 8));
    if (lower_head != "variant:") {
      return absl::InvalidArgumentError(StrCat("malformed variant line '", s, "'"));
    }
    s = StripWhitespace(s.substr(8));
    size_t kind_end = 0;
    while (kind_end < s.size() && std::isalpha(static_cast<unsigned char>(s[kind_end]))) ++kind_end;
    FORGE_ASSIGN_OR_RETURN(VariantKind kind, ParseVariant(s.substr(0, kind_end)));
    std::string_view rest = StripWhitespace(s.substr(kind_end));
    for (std::string_view sep : {"—", "–", "-", ":"}) {
      if (ConsumePrefix(&rest, sep)) break;
    }
    out.push_back({kind, std::string(StripWhitespace(rest))});
  }
  return out;
}

std::string_view DistillTaskName(DistillTask task) {
  return task == DistillTask::kSpecToChisel ? "s2c" : "d2c";
}

absl::StatusOr<DistillTask> ParseDistillTask(std::string_view name) {
  std::string lower = ToLower(name);
  if (lower == "s2c" || lower == "spec-to-chisel" || lower == "completion") {
    return DistillTask::kSpecToChisel;
  }
  if (lower == "d2c" || lower == "decompile-to-chisel" || lower == "decompile") {
    return DistillTask::kDecompileToChisel;
  }
  return absl::InvalidArgumentError(StrCat("unknown distillation task '", name, "'"));
}

GuidanceBundle MakeS2CBundle(std::vector<docindex::DocFragment> docs, std::string benchmark) {
  GuidanceBundle b;
  b.task = DistillTask::kSpecToChisel;
  b.doc_fragments = std::move(docs);
  b.benchmark_answer = std::move(benchmark);
  return b;
}

GuidanceBundle MakeD2CBundle(std::string feature_catalog) {
  GuidanceBundle b;
  b.task = DistillTask::kDecompileToChisel;
  b.variant_requirements = {VariantKind::kConfigurable, VariantKind::kFunctional,
                            VariantKind::kStructural};
  b.feature_catalog = std::move(feature_catalog);
  return b;
}

absl::Status ValidateBundle(const GuidanceBundle& b) {
  if (b.task == DistillTask::kSpecToChisel) {
    if (!b.variant_requirements.empty()) {
      return absl::InvalidArgumentError("S2C guidance carries no variant requirements");
    }
    return absl::OkStatus();
  }
  if (!b.doc_fragments.empty() || b.benchmark_answer) {
    return absl::InvalidArgumentError("D2C guidance carries no docs or benchmark");
  }
  if (std::find(b.variant_requirements.begin(), b.variant_requirements.end(),
                VariantKind::kConfigurable) == b.variant_requirements.end()) {
    return absl::InvalidArgumentError("D2C guidance must require a configurable variant");
  }
  return absl::OkStatus();
}

absl::StatusOr<ReasoningTrace> ParseTeacherOutput(std::string_view text) {
  if (StripWhitespace(text).empty()) return absl::InvalidArgumentError("empty teacher output");
  constexpr std::string_view kOpen = "<think>";
  constexpr std::string_view kClose = "</think>";
  ReasoningTrace trace;
  size_t open = text.find(kOpen);
  size_t close = text.rfind(kClose);
  if (open != std::string_view::npos && (close == std::string_view::npos || close < open)) {
    return absl::InvalidArgumentError("unterminated <think> block");
  }
  std::string_view answer_part = text;
  if (close != std::string_view::npos) {
    // Reasoning models commonly omit the opening tag; everything before the
    // closing tag is then the reasoning.
    size_t start = open == std::string_view::npos ? 0 : open + kOpen.size();
    trace.think_text = std::string(StripWhitespace(text.substr(start, close - start)));
    answer_part = text.substr(close + kClose.size());
  }

  std::vector<FencedBlock> blocks = FindFencedBlocks(answer_part);
  const FencedBlock* variants = nullptr;
  const FencedBlock* code = nullptr;
  for (const FencedBlock& b : blocks) {
    std::string info = ToLower(b.info);
    if (info == "variants" || info == "variant") {
      if (variants == nullptr) variants = &b;
    } else if (info != "verilog" && info != "systemverilog" && info != "sv") {
      code = &b;
    }
  }
  if (variants != nullptr) {
    absl::StatusOr<std::vector<DeclaredVariant>> declared = ParseVariantLines(variants->body);
    if (!declared.ok()) {
      return absl::InvalidArgumentError(
          StrCat("variants block: ", declared.status().message()));
    }
    trace.declared_variants = *std::move(declared);
  }
  if (code != nullptr) trace.answer_code = std::string(StripWhitespace(code->body)) + "\n";
  if (StripWhitespace(trace.answer_code).empty()) trace.answer_code.clear();
  return trace;
}

std::string RenderAssistantTurn(const ReasoningTrace& trace) {
  std::string out = StrCat("<think>\n", trace.think_text, "\n</think>\n\n");
  if (!trace.declared_variants.empty()) {
    out += "```variants\n";
    for (const DeclaredVariant& v : trace.declared_variants) {
      StrAppend(&out, "variant: ", VariantName(v.kind), " — ", v.description, "\n");
    }
    out += "```\n\n";
  }
  StrAppend(&out, "```scala\n", trace.answer_code, "```\n");
  return out;
}

double TokenOverlap(std::string_view a, std::string_view b) {
  std::vector<std::string> ta = DefaultTokenizer().Tokenize(StripComments(a));
  std::vector<std::string> tb = DefaultTokenizer().Tokenize(StripComments(b));
  if (ta.empty() && tb.empty()) return 1.0;
  std::unordered_map<std::string, long> counts;
  for (const std::string& t : ta) ++counts[t];
  long common = 0;
  for (const std::string& t : tb) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(ta.size() + tb.size());
}

Validation ValidateTrace(const ReasoningTrace& trace, const GuidanceBundle& bundle,
                         const ValidatorConfig& config) {
  if (StripWhitespace(trace.think_text).empty()) return Validation::Reject("missing-think");
  if (StripWhitespace(trace.answer_code).empty()) return Validation::Reject("missing-code");
  if (!HasModuleDefinition(trace.answer_code)) return Validation::Reject("missing-module");
  if (bundle.task == DistillTask::kDecompileToChisel) {
    int configurable = 0;
    int other = 0;
    for (const DeclaredVariant& v : trace.declared_variants) {
      (v.kind == VariantKind::kConfigurable ? configurable : other) += 1;
    }
    if (configurable == 0) return Validation::Reject("missing-configurable");
    if (configurable != 1 || other != 1) return Validation::Reject("variant-count");
  } else if (bundle.benchmark_answer && !bundle.benchmark_answer->empty()) {
    if (TokenOverlap(trace.answer_code, *bundle.benchmark_answer) <
        config.benchmark_overlap_threshold) {
      return Validation::Reject("diverged-from-benchmark");
    }
  }
  return Validation::Accept();
}

json TraceToJson(const ReasoningTrace& t) {
  json variants = json::array();
  for (const DeclaredVariant& v : t.declared_variants) {
    variants.push_back({{"kind", VariantName(v.kind)}, {"description", v.description}});
  }
  return {{"think", t.think_text}, {"answer", t.answer_code}, {"variants", std::move(variants)}};
}

absl::StatusOr<ReasoningTrace> TraceFromJson(const json& j) {
  try {
    ReasoningTrace t;
    t.think_text = j.value("think", std::string());
    t.answer_code = j.value("answer", std::string());
    for (const json& v : j.value("variants", json::array())) {
      FORGE_ASSIGN_OR_RETURN(VariantKind kind, ParseVariant(v.at("kind").get<std::string>()));
      t.declared_variants.push_back({kind, v.value("description", std::string())});
    }
    return t;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad trace: ", e.what()));
  }
}

}  // namespace forge::distill
