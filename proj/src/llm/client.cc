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

#include "forge/llm/client.h"

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <random>
#include <thread>

#include "forge/common/strings.h"
#include "forge/common/parallel.h"

namespace forge::llm {

using nlohmann::json;

ChatClient::ChatClient(std::shared_ptr<Transport> transport, ClientOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {
  if (options_.cache_dir) cache_.emplace(*options_.cache_dir);
  if (!options_.sleep) {
    options_.sleep = [](double s) {
      std::this_thread::sleep_for(std::chrono::duration<double>(s));
    };
  }
}

absl::StatusOr<ChatResponse> ChatClient::Complete(const ChatRequest& request) {
  if (absl::Status valid = ValidateRequest(request); !valid.ok()) return valid;
  std::string key;
  if (cache_) {
    key = RequestKey(request);
    if (std::optional<ChatResponse> hit = cache_->Lookup(key)) return *std::move(hit);
  }
  thread_local std::mt19937_64 jitter_rng{std::random_device{}()};
  const RetryPolicy& retry = options_.retry;
  absl::Status last;
  double delay = retry.base_delay_s;
  for (int attempt = 1; attempt <= std::max(retry.max_attempts, 1); ++attempt) {
    if (options_.rate_limiter) options_.rate_limiter->Acquire();
    attempts_.fetch_add(1);
    absl::StatusOr<ChatResponse> response = transport_->Send(request);
    if (response.ok()) {
      if (response->finish_reason == FinishReason::kLength) {
        spdlog::warn("completion for model {} hit the output budget; content truncated",
                     request.model_name);
      }
      response->cached = false;
      if (cache_ && response->finish_reason != FinishReason::kError) {
        if (absl::Status stored = cache_->Store(key, request, *response); !stored.ok()) {
          spdlog::warn("cache write failed: {}", stored.ToString());
        }
      }
      return response;
    }
    last = response.status();
    if (!IsTransient(last)) return last;
    if (attempt < retry.max_attempts) {
      std::uniform_real_distribution<double> spread(1.0 - retry.jitter, 1.0 + retry.jitter);
      double wait = delay * spread(jitter_rng);
      spdlog::debug("attempt {} failed ({}); retrying in {:.2f}s", attempt, last.ToString(), wait);
      options_.sleep(wait);
      delay *= retry.factor;
    }
  }
  return absl::UnavailableError(
      StrCat("retries exhausted after ", retry.max_attempts,
                   " attempts: ", last.message()));
}

std::vector<absl::StatusOr<ChatResponse>> ChatClient::CompleteMany(
    std::span<const ChatRequest> requests, int parallelism) {
  std::vector<absl::StatusOr<ChatResponse>> results(
      requests.size(), absl::UnknownError("not run"));
  ParallelFor(requests.size(), parallelism,
              [&](size_t i) { results[i] = Complete(requests[i]); });
  return results;
}

absl::StatusOr<LlmConfig> LlmConfigFromJson(const json& j, LlmConfig c) {
  if (!j.is_object()) return absl::InvalidArgumentError("llm config must be an object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const json& v = it.value();
      if (k == "provider") c.provider = v.get<std::string>();
      else if (k == "endpoint_url") c.endpoint_url = v.get<std::string>();
      else if (k == "model_name") c.model_name = v.get<std::string>();
      else if (k == "api_key_env") c.api_key_env = v.get<std::string>();
      else if (k == "fixture_path") c.fixture_path = v.get<std::string>();
      else if (k == "cache_dir") c.cache_dir = v.get<std::string>();
      else if (k == "timeout_s") c.timeout_s = v.get<double>();
      else if (k == "max_retries") c.max_retries = v.get<int>();
      else if (k == "temperature") c.temperature = v.get<double>();
      else if (k == "max_output_tokens") c.max_output_tokens = v.get<int>();
      else if (k == "parallelism") c.parallelism = v.get<int>();
      else if (k == "rate_limit_rps") c.rate_limit_rps = v.get<double>();
      else return absl::InvalidArgumentError(StrCat("unknown llm config key '", k, "'"));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad llm config: ", e.what()));
  }
  if (c.provider != "http" && c.provider != "fixture") {
    return absl::InvalidArgumentError(
        StrCat("llm provider must be 'http' or 'fixture', got '", c.provider, "'"));
  }
  if (c.parallelism < 1) return absl::InvalidArgumentError("llm parallelism must be >= 1");
  if (c.max_retries < 1) return absl::InvalidArgumentError("llm max_retries must be >= 1");
  return c;
}

json LlmConfigToJson(const LlmConfig& c) {
  return {{"provider", c.provider},       {"endpoint_url", c.endpoint_url},
          {"model_name", c.model_name},   {"api_key_env", c.api_key_env},
          {"fixture_path", c.fixture_path}, {"cache_dir", c.cache_dir},
          {"timeout_s", c.timeout_s},     {"max_retries", c.max_retries},
          {"temperature", c.temperature}, {"max_output_tokens", c.max_output_tokens},
          {"parallelism", c.parallelism}, {"rate_limit_rps", c.rate_limit_rps}};
}

absl::StatusOr<std::unique_ptr<ChatClient>> MakeClient(const LlmConfig& config) {
  std::shared_ptr<Transport> transport;
  std::string limiter_key;
  if (config.provider == "fixture") {
    if (config.fixture_path.empty()) {
      return absl::FailedPreconditionError("fixture provider needs fixture_path");
    }
    absl::StatusOr<std::unique_ptr<FixtureTransport>> fixture =
        FixtureTransport::FromFile(config.fixture_path);
    if (!fixture.ok()) return fixture.status();
    transport = *std::move(fixture);
    limiter_key = "fixture:" + config.fixture_path;
  } else {
    if (config.endpoint_url.empty()) {
      return absl::FailedPreconditionError("llm endpoint_url is not configured");
    }
    HttpTransportOptions http;
    http.endpoint_url = config.endpoint_url;
    http.timeout_s = config.timeout_s;
    if (const char* key = std::getenv(config.api_key_env.c_str())) http.api_key = key;
    absl::StatusOr<std::unique_ptr<HttpTransport>> created = HttpTransport::Create(http);
    if (!created.ok()) return created.status();
    transport = *std::move(created);
    limiter_key = config.endpoint_url;
  }
  ClientOptions options;
  options.retry.max_attempts = config.max_retries;
  if (!config.cache_dir.empty()) options.cache_dir = config.cache_dir;
  if (config.rate_limit_rps > 0) {
    options.rate_limiter = RateLimiter::ForEndpoint(limiter_key, config.rate_limit_rps,
                                                    std::max(1.0, config.rate_limit_rps));
  }
  return std::make_unique<ChatClient>(std::move(transport), std::move(options));
}

}  // namespace forge::llm
