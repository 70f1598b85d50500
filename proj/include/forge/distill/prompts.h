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

#ifndef FORGE_DISTILL_PROMPTS_H_
#define FORGE_DISTILL_PROMPTS_H_

#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "forge/corpus/corpus.h"
#include "forge/docindex/docindex.h"

namespace forge::distill {

// Prompt text lives in plain files with {{name}} placeholders. The defaults
// are compiled in from templates/; a directory of same-named .txt files
// overrides any subset of them.
struct PromptTemplates {
  std::string s2c_teacher;
  std::string s2c_student;
  std::string d2c_teacher;
  std::string d2c_student;
  std::string variant_definitions;
  std::string feature_catalog;
  std::string student_system;

  static PromptTemplates Defaults();
  static absl::StatusOr<PromptTemplates> Load(const std::filesystem::path& dir);
};

struct PromptPair {
  std::string teacher;
  std::string student;
};

absl::StatusOr<PromptPair> BuildS2CPrompt(const corpus::CodeSample& sample,
                                          const std::vector<docindex::DocFragment>& docs,
                                          std::string_view benchmark,
                                          const PromptTemplates& templates);

absl::StatusOr<PromptPair> BuildD2CPrompt(const corpus::CodeSample& sample,
                                          std::string_view feature_catalog,
                                          const PromptTemplates& templates);

// Citable rendering of fragments for the teacher prompt.
std::string RenderDocs(const std::vector<docindex::DocFragment>& docs);

}  // namespace forge::distill

#endif  // FORGE_DISTILL_PROMPTS_H_
