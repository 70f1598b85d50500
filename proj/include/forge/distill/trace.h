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

#ifndef FORGE_DISTILL_TRACE_H_
#define FORGE_DISTILL_TRACE_H_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "forge/docindex/docindex.h"
#include "nlohmann/json.hpp"

namespace forge::distill {

enum class VariantKind { kConfigurable, kFunctional, kStructural };

inline constexpr VariantKind kAllVariantKinds[] = {
    VariantKind::kConfigurable, VariantKind::kFunctional, VariantKind::kStructural};

std::string_view VariantName(VariantKind kind);
absl::StatusOr<VariantKind> ParseVariant(std::string_view name);

struct DeclaredVariant {
  VariantKind kind;
  std::string description;

  friend bool operator==(const DeclaredVariant&, const DeclaredVariant&) = default;
};

// Parses `variant: <kind> - <description>` lines. The separator may also be
// ':' or a Unicode dash. Blank lines are skipped; anything else is an error.
absl::StatusOr<std::vector<DeclaredVariant>> ParseVariantLines(std::string_view text);

enum class DistillTask { kSpecToChisel, kDecompileToChisel };

std::string_view DistillTaskName(DistillTask task);
absl::StatusOr<DistillTask> ParseDistillTask(std::string_view name);

struct GuidanceBundle {
  DistillTask task = DistillTask::kSpecToChisel;
  std::vector<docindex::DocFragment> doc_fragments;    // S2C only
  std::optional<std::string> benchmark_answer;         // S2C only
  std::vector<VariantKind> variant_requirements;       // D2C only
  std::string feature_catalog;                         // D2C only
};

// S2C: docs + benchmark. D2C: requires Configurable and one of
// Functional/Structural.
GuidanceBundle MakeS2CBundle(std::vector<docindex::DocFragment> docs, std::string benchmark);
GuidanceBundle MakeD2CBundle(std::string feature_catalog);
absl::Status ValidateBundle(const GuidanceBundle& bundle);

struct ReasoningTrace {
  std::string think_text;
  std::string answer_code;
  std::vector<DeclaredVariant> declared_variants;

  friend bool operator==(const ReasoningTrace&, const ReasoningTrace&) = default;
};

// Splits a teacher reply into reasoning (between <think> and </think>), the
// variants block, and the final code (last fenced block after </think>).
// A missing think block yields an empty think_text for the validator to
// reject; blank output, an unclosed <think>, or a malformed variants block
// is a parse error.
absl::StatusOr<ReasoningTrace> ParseTeacherOutput(std::string_view text);

// Chat-format assistant turn reconstructed from a trace.
std::string RenderAssistantTurn(const ReasoningTrace& trace);

struct Validation {
  bool accepted = true;
  std::string reason;

  static Validation Accept() { return {true, ""}; }
  static Validation Reject(std::string reason) { return {false, std::move(reason)}; }
  friend bool operator==(const Validation&, const Validation&) = default;
};

struct ValidatorConfig {
  double benchmark_overlap_threshold = 0.5;
};

// Dice coefficient over comment-stripped token multisets:
// 2|A ∩ B| / (|A| + |B|). Two empty inputs have overlap 1.
double TokenOverlap(std::string_view a, std::string_view b);

// Checks, in order: missing-think, missing-code, missing-module; then for
// D2C missing-configurable and variant-count; for S2C with a benchmark,
// diverged-from-benchmark.
Validation ValidateTrace(const ReasoningTrace& trace, const GuidanceBundle& bundle,
                         const ValidatorConfig& config = {});

nlohmann::json TraceToJson(const ReasoningTrace& trace);
absl::StatusOr<ReasoningTrace> TraceFromJson(const nlohmann::json& json);

}  // namespace forge::distill

#endif  // FORGE_DISTILL_TRACE_H_
