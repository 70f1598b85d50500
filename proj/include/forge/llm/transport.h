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

#ifndef FORGE_LLM_TRANSPORT_H_
#define FORGE_LLM_TRANSPORT_H_

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "forge/llm/chat.h"
#include "nlohmann/json.hpp"

namespace forge::llm {

// One attempt at a chat completion. Retries, caching, and rate limiting
// live in ChatClient; a transport only talks to the provider.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual absl::StatusOr<ChatResponse> Send(const ChatRequest& request) = 0;
};

struct HttpTransportOptions {
  // Full URL of the chat-completions route, e.g.
  // http://localhost:8000/v1/chat/completions
  std::string endpoint_url;
  std::string api_key;
  double timeout_s = 600.0;
};

// Speaks the OpenAI-compatible chat-completions JSON shape. A
// `reasoning_content` field in the reply (as served for reasoning models)
// is folded back into the content inside <think> delimiters.
class HttpTransport : public Transport {
 public:
  static absl::StatusOr<std::unique_ptr<HttpTransport>> Create(
      HttpTransportOptions options);

  absl::StatusOr<ChatResponse> Send(const ChatRequest& request) override;

 private:
  HttpTransport(HttpTransportOptions options, std::string base, std::string path)
      : options_(std::move(options)), base_(std::move(base)), path_(std::move(path)) {}

  HttpTransportOptions options_;
  std::string base_;
  std::string path_;
};

// Wire helpers, shared with test servers.
nlohmann::json ToWireRequest(const ChatRequest& request);
absl::StatusOr<ChatResponse> FromWireResponse(const nlohmann::json& body);

// Canned responses keyed by request patterns, for tests and offline runs.
//
// Fixture file: {"rules": [rule, ...]} or a bare array of rules, where
//   rule = {
//     "contains": "text" | ["all", "of", "these"],   // optional
//     "model": "name",                               // optional
//     "response": "text",                            // or
//     "sequence": [{"status": 500}, {"response": "ok"}, ...],
//     "status": 200, "finish_reason": "stop"
//   }
// Patterns match against the concatenated message contents; the first
// matching rule answers. A sequence is consumed one entry per call and its
// last entry repeats. Response text may contain {{extract:BEGIN|END}},
// which copies the request text found between the first BEGIN and the next
// END; this lets a mock teacher echo a reference section of its prompt.
class FixtureTransport : public Transport {
 public:
  static absl::StatusOr<std::unique_ptr<FixtureTransport>> FromFile(
      const std::filesystem::path& path);
  static absl::StatusOr<std::unique_ptr<FixtureTransport>> FromJson(
      const nlohmann::json& fixture);

  absl::StatusOr<ChatResponse> Send(const ChatRequest& request) override;

 private:
  struct Reply {
    int status = 200;
    std::string response;
    FinishReason finish_reason = FinishReason::kStop;
  };
  struct Rule {
    std::vector<std::string> contains;
    std::string model;
    std::vector<Reply> replies;
    size_t next = 0;
  };

  explicit FixtureTransport(std::vector<Rule> rules) : rules_(std::move(rules)) {}

  std::mutex mu_;
  std::vector<Rule> rules_;
};

// Adapts a callable; used heavily by tests.
class FunctionTransport : public Transport {
 public:
  using Fn = std::function<absl::StatusOr<ChatResponse>(const ChatRequest&)>;
  explicit FunctionTransport(Fn fn) : fn_(std::move(fn)) {}
  absl::StatusOr<ChatResponse> Send(const ChatRequest& request) override {
    return fn_(request);
  }

 private:
  Fn fn_;
};

// Expands {{extract:BEGIN|END}} directives against `request_text`.
std::string ExpandExtracts(std::string_view response, std::string_view request_text);

}  // namespace forge::llm

#endif  // FORGE_LLM_TRANSPORT_H_
