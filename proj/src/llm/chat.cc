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

#include "forge/llm/chat.h"

#include "forge/common/strings.h"
#include "forge/common/hash.h"

namespace forge::llm {

using nlohmann::json;

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kSystem:
      return "system";
    case Role::kUser:
      return "user";
    case Role::kAssistant:
      return "assistant";
  }
  return "user";
}

absl::StatusOr<Role> ParseRole(std::string_view name) {
  if (name == "system") return Role::kSystem;
  if (name == "user") return Role::kUser;
  if (name == "assistant") return Role::kAssistant;
  return absl::InvalidArgumentError(StrCat("unknown role '", name, "'"));
}

absl::Status ValidateRequest(const ChatRequest& request) {
  if (request.messages.empty()) {
    return absl::InvalidArgumentError("chat request has no messages");
  }
  if (request.messages.front().role == Role::kAssistant) {
    return absl::InvalidArgumentError(
        "first message must be a system or user turn");
  }
  if (!(request.temperature >= 0.0)) {
    return absl::InvalidArgumentError("temperature must be >= 0");
  }
  if (request.max_output_tokens <= 0) {
    return absl::InvalidArgumentError("max_output_tokens must be positive");
  }
  return absl::OkStatus();
}

json RequestToJson(const ChatRequest& request) {
  json messages = json::array();
  for (const Message& m : request.messages) {
    messages.push_back({{"role", RoleName(m.role)}, {"content", m.content}});
  }
  json out = {{"model_name", request.model_name},
              {"messages", std::move(messages)},
              {"temperature", request.temperature},
              {"max_output_tokens", request.max_output_tokens}};
  out["seed_hint"] = request.seed_hint ? json(*request.seed_hint) : json(nullptr);
  return out;
}

absl::StatusOr<ChatRequest> RequestFromJson(const json& j) {
  try {
    ChatRequest request;
    request.model_name = j.at("model_name").get<std::string>();
    for (const json& m : j.at("messages")) {
      absl::StatusOr<Role> role = ParseRole(m.at("role").get<std::string>());
      if (!role.ok()) return role.status();
      request.messages.push_back({*role, m.at("content").get<std::string>()});
    }
    request.temperature = j.value("temperature", 0.0);
    request.max_output_tokens = j.value("max_output_tokens", 4096);
    if (j.contains("seed_hint") && !j["seed_hint"].is_null()) {
      request.seed_hint = j["seed_hint"].get<int64_t>();
    }
    return request;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad chat request: ", e.what()));
  }
}

std::string RequestKey(const ChatRequest& request) {
  return Sha256Hex(RequestToJson(request).dump());
}

std::string_view FinishReasonName(FinishReason reason) {
  switch (reason) {
    case FinishReason::kStop:
      return "stop";
    case FinishReason::kLength:
      return "length";
    case FinishReason::kError:
      return "error";
  }
  return "error";
}

absl::StatusOr<FinishReason> ParseFinishReason(std::string_view name) {
  if (name == "stop" || name == "eos" || name.empty()) return FinishReason::kStop;
  if (name == "length") return FinishReason::kLength;
  if (name == "error") return FinishReason::kError;
  return absl::InvalidArgumentError(
      StrCat("unknown finish_reason '", name, "'"));
}

json ResponseToJson(const ChatResponse& response) {
  return {{"content", response.content},
          {"finish_reason", FinishReasonName(response.finish_reason)},
          {"usage",
           {{"prompt_tokens", response.usage.prompt_tokens},
            {"completion_tokens", response.usage.completion_tokens}}}};
}

absl::StatusOr<ChatResponse> ResponseFromJson(const json& j) {
  try {
    ChatResponse response;
    response.content = j.at("content").get<std::string>();
    absl::StatusOr<FinishReason> finish =
        ParseFinishReason(j.value("finish_reason", std::string("stop")));
    if (!finish.ok()) return finish.status();
    response.finish_reason = *finish;
    if (j.contains("usage")) {
      response.usage.prompt_tokens = j["usage"].value("prompt_tokens", int64_t{0});
      response.usage.completion_tokens =
          j["usage"].value("completion_tokens", int64_t{0});
    }
    return response;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad chat response: ", e.what()));
  }
}

ChatRequest MakeRequest(std::string model_name, std::string system,
                        std::string user, double temperature,
                        int max_output_tokens) {
  ChatRequest request;
  request.model_name = std::move(model_name);
  if (!system.empty()) request.messages.push_back({Role::kSystem, std::move(system)});
  request.messages.push_back({Role::kUser, std::move(user)});
  request.temperature = temperature;
  request.max_output_tokens = max_output_tokens;
  return request;
}

bool IsTransient(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kResourceExhausted:
    case absl::StatusCode::kDeadlineExceeded:
    case absl::StatusCode::kAborted:
      return true;
    default:
      return false;
  }
}

absl::Status StatusFromHttp(int http_status, std::string_view body) {
  std::string message = StrCat("HTTP ", http_status, ": ", body.substr(0, 512));
  if (http_status >= 200 && http_status < 300) return absl::OkStatus();
  if (http_status == 408) return absl::DeadlineExceededError(message);
  if (http_status == 429) return absl::ResourceExhaustedError(message);
  if (http_status >= 500) return absl::UnavailableError(message);
  if (http_status == 401) return absl::UnauthenticatedError(message);
  if (http_status == 403) return absl::PermissionDeniedError(message);
  if (http_status == 404) return absl::NotFoundError(message);
  return absl::InvalidArgumentError(message);
}

}  // namespace forge::llm
