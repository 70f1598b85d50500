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

#ifndef FORGE_LLM_CHAT_H_
#define FORGE_LLM_CHAT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace forge::llm {

enum class Role { kSystem, kUser, kAssistant };

std::string_view RoleName(Role role);
absl::StatusOr<Role> ParseRole(std::string_view name);

struct Message {
  Role role = Role::kUser;
  std::string content;

  friend bool operator==(const Message&, const Message&) = default;
};

struct ChatRequest {
  std::string model_name;
  std::vector<Message> messages;
  double temperature = 0.0;
  int max_output_tokens = 4096;
  std::optional<int64_t> seed_hint;

  friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

// Messages must be non-empty and start with a system or user turn;
// temperature must be non-negative and the output budget positive.
absl::Status ValidateRequest(const ChatRequest& request);

// Canonical JSON form. Every field participates, so it doubles as the cache
// key material.
nlohmann::json RequestToJson(const ChatRequest& request);
absl::StatusOr<ChatRequest> RequestFromJson(const nlohmann::json& json);

// Content address of a request (SHA-256 over the canonical JSON).
std::string RequestKey(const ChatRequest& request);

enum class FinishReason { kStop, kLength, kError };

std::string_view FinishReasonName(FinishReason reason);
absl::StatusOr<FinishReason> ParseFinishReason(std::string_view name);

struct Usage {
  int64_t prompt_tokens = 0;
  int64_t completion_tokens = 0;
};

struct ChatResponse {
  std::string content;
  FinishReason finish_reason = FinishReason::kStop;
  Usage usage;
  bool cached = false;

  // The provider stopped on the output budget; content is incomplete.
  bool truncated() const { return finish_reason == FinishReason::kLength; }
};

nlohmann::json ResponseToJson(const ChatResponse& response);
absl::StatusOr<ChatResponse> ResponseFromJson(const nlohmann::json& json);

// Convenience for the common single-turn shape.
ChatRequest MakeRequest(std::string model_name, std::string system,
                        std::string user, double temperature,
                        int max_output_tokens = 4096);

// Whether a failed call is worth retrying (rate limits, 5xx, timeouts,
// dropped connections).
bool IsTransient(const absl::Status& status);

// Maps an HTTP status code onto the status space used by the client.
absl::Status StatusFromHttp(int http_status, std::string_view body);

}  // namespace forge::llm

#endif  // FORGE_LLM_CHAT_H_
