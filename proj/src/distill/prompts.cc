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

#include "forge/distill/prompts.h"

#include "forge/common/files.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"
#include "forge/common/template.h"

namespace forge::distill {

namespace embedded {
extern const char k_s2c_teacher[];
extern const char k_s2c_student[];
extern const char k_d2c_teacher[];
extern const char k_d2c_student[];
extern const char k_variant_definitions[];
extern const char k_feature_catalog[];
extern const char k_student_system[];
}  // namespace embedded

namespace {

std::string TrimBlock(std::string_view text) { return std::string(StripWhitespace(text)); }

}  // namespace

PromptTemplates PromptTemplates::Defaults() {
  PromptTemplates t;
  t.s2c_teacher = embedded::k_s2c_teacher;
  t.s2c_student = embedded::k_s2c_student;
  t.d2c_teacher = embedded::k_d2c_teacher;
  t.d2c_student = embedded::k_d2c_student;
  t.variant_definitions = TrimBlock(embedded::k_variant_definitions);
  t.feature_catalog = TrimBlock(embedded::k_feature_catalog);
  t.student_system = TrimBlock(embedded::k_student_system);
  return t;
}

absl::StatusOr<PromptTemplates> PromptTemplates::Load(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    return absl::NotFoundError(StrCat("template directory not found: ", dir.string()));
  }
  PromptTemplates t = Defaults();
  struct Slot {
    const char* file;
    std::string* field;
    bool trim;
  };
  Slot slots[] = {{"s2c_teacher.txt", &t.s2c_teacher, false},
                  {"s2c_student.txt", &t.s2c_student, false},
                  {"d2c_teacher.txt", &t.d2c_teacher, false},
                  {"d2c_student.txt", &t.d2c_student, false},
                  {"variant_definitions.txt", &t.variant_definitions, true},
                  {"feature_catalog.txt", &t.feature_catalog, true},
                  {"student_system.txt", &t.student_system, true}};
  for (const Slot& slot : slots) {
    std::filesystem::path path = dir / slot.file;
    if (!std::filesystem::exists(path, ec)) continue;
    FORGE_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
    *slot.field = slot.trim ? TrimBlock(text) : text;
  }
  return t;
}

std::string RenderDocs(const std::vector<docindex::DocFragment>& docs) {
  std::string out;
  for (const docindex::DocFragment& d : docs) {
    StrAppend(&out, out.empty() ? "" : "\n", "### [doc:", d.chapter_id, "] ", d.title, "\n",
              StripWhitespace(d.body), "\n");
  }
  return out;
}

absl::StatusOr<PromptPair> BuildS2CPrompt(const corpus::CodeSample& sample,
                                          const std::vector<docindex::DocFragment>& docs,
                                          std::string_view benchmark,
                                          const PromptTemplates& templates) {
  if (sample.task != corpus::TaskKind::kCompletion) {
    return absl::InvalidArgumentError("spec-to-chisel prompts need a completion sample");
  }
  if (StripWhitespace(sample.spec_text).empty()) {
    return absl::InvalidArgumentError("sample lacks specification");
  }
  if (StripWhitespace(benchmark).empty()) {
    return absl::InvalidArgumentError("benchmark answer is empty");
  }
  TemplateVars vars = {{"spec", TrimBlock(sample.spec_text)},
                       {"context", TrimBlock(sample.context_text)},
                       {"docs", TrimBlock(RenderDocs(docs))},
                       {"benchmark", TrimBlock(benchmark)}};
  PromptPair out;
  FORGE_ASSIGN_OR_RETURN(out.teacher, RenderTemplate(templates.s2c_teacher, vars));
  FORGE_ASSIGN_OR_RETURN(out.student, RenderTemplate(templates.s2c_student, vars));
  return out;
}

absl::StatusOr<PromptPair> BuildD2CPrompt(const corpus::CodeSample& sample,
                                          std::string_view feature_catalog,
                                          const PromptTemplates& templates) {
  if (sample.task != corpus::TaskKind::kDecompile) {
    return absl::InvalidArgumentError("decompile-to-chisel prompts need a decompile sample");
  }
  if (StripWhitespace(sample.source_code).empty()) {
    return absl::InvalidArgumentError("Verilog source is empty");
  }
  TemplateVars vars = {{"verilog", TrimBlock(sample.source_code)},
                       {"variant_definitions", templates.variant_definitions},
                       {"feature_catalog", TrimBlock(feature_catalog)}};
  PromptPair out;
  FORGE_ASSIGN_OR_RETURN(out.teacher, RenderTemplate(templates.d2c_teacher, vars));
  FORGE_ASSIGN_OR_RETURN(out.student, RenderTemplate(templates.d2c_student, vars));
  return out;
}

}  // namespace forge::distill
