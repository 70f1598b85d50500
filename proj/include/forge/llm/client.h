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

#ifndef FORGE_LLM_CLIENT_H_
#define FORGE_LLM_CLIENT_H_

#include <atomic>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "forge/llm/cache.h"
#include "forge/llm/chat.h"
#include "forge/llm/rate_limiter.h"
#include "forge/llm/transport.h"
#include "nlohmann/json.hpp"

namespace forge::llm {

struct RetryPolicy {
  int max_attempts = 5;
  double base_delay_s = 1.0;
  double factor = 2.0;
  // Fraction of each delay that is randomized.
  double jitter = 0.25;
};

struct ClientOptions {
  RetryPolicy retry;
  std::optional<std::filesystem::path> cache_dir;
  std::shared_ptr<RateLimiter> rate_limiter;
  // Replaceable so tests do not wait out real backoff delays.
  std::function<void(double seconds)> sleep;
};

// Thread-safe chat client: retries transient failures with exponential
// backoff, never retries permanent ones, and serves repeated identical
// requests from the on-disk cache.
class ChatClient {
 public:
  ChatClient(std::shared_ptr<Transport> transport, ClientOptions options);

  absl::StatusOr<ChatResponse> Complete(const ChatRequest& request);

  // Results are in input order. At most `parallelism` requests are in
  // flight; each slot fails independently.
  std::vector<absl::StatusOr<ChatResponse>> CompleteMany(
      std::span<const ChatRequest> requests, int parallelism);

  // Transport calls made so far, including retries.
  int64_t attempts() const { return attempts_.load(); }

 private:
  std::shared_ptr<Transport> transport_;
  ClientOptions options_;
  std::optional<ResponseCache> cache_;
  std::atomic<int64_t> attempts_{0};
};

// Per-role model configuration as read from the shared config file.
struct LlmConfig {
  // "http" talks to endpoint_url; "fixture" answers from fixture_path.
  std::string provider = "http";
  std::string endpoint_url;
  std::string model_name;
  std::string api_key_env = "FORGE_API_KEY";
  std::string fixture_path;
  std::string cache_dir;
  double timeout_s = 600.0;
  int max_retries = 5;
  double temperature = 0.6;
  int max_output_tokens = 16384;
  int parallelism = 4;
  double rate_limit_rps = 0.0;
};

// Missing keys keep their defaults; unknown keys are rejected.
absl::StatusOr<LlmConfig> LlmConfigFromJson(const nlohmann::json& json,
                                            LlmConfig defaults = {});
nlohmann::json LlmConfigToJson(const LlmConfig& config);

absl::StatusOr<std::unique_ptr<ChatClient>> MakeClient(const LlmConfig& config);

}  // namespace forge::llm

#endif  // FORGE_LLM_CLIENT_H_
