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

#ifndef FORGE_LLM_ANNOTATOR_H_
#define FORGE_LLM_ANNOTATOR_H_

#include <functional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "forge/llm/client.h"

namespace forge::llm {

// Text-in/text-out model used to annotate code (design specifications,
// line-level documentation references).
class AnnotationClient {
 public:
  virtual ~AnnotationClient() = default;
  virtual absl::StatusOr<std::string> Annotate(std::string_view instructions,
                                               std::string_view input) = 0;
};

class LlmAnnotationClient : public AnnotationClient {
 public:
  LlmAnnotationClient(ChatClient& client, std::string model_name,
                      double temperature, int max_output_tokens)
      : client_(client),
        model_name_(std::move(model_name)),
        temperature_(temperature),
        max_output_tokens_(max_output_tokens) {}

  absl::StatusOr<std::string> Annotate(std::string_view instructions,
                                       std::string_view input) override {
    absl::StatusOr<ChatResponse> response = client_.Complete(
        MakeRequest(model_name_, std::string(instructions), std::string(input),
                    temperature_, max_output_tokens_));
    if (!response.ok()) return response.status();
    return std::move(response->content);
  }

 private:
  ChatClient& client_;
  std::string model_name_;
  double temperature_;
  int max_output_tokens_;
};

class FunctionAnnotationClient : public AnnotationClient {
 public:
  using Fn = std::function<absl::StatusOr<std::string>(std::string_view, std::string_view)>;
  explicit FunctionAnnotationClient(Fn fn) : fn_(std::move(fn)) {}
  absl::StatusOr<std::string> Annotate(std::string_view instructions,
                                       std::string_view input) override {
    return fn_(instructions, input);
  }

 private:
  Fn fn_;
};

}  // namespace forge::llm

#endif  // FORGE_LLM_ANNOTATOR_H_
