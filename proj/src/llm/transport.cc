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

#include "forge/llm/transport.h"

#include "httplib.h"

#include "forge/common/strings.h"
#include "forge/common/files.h"
#include "forge/common/tokenizer.h"

namespace forge::llm {

using nlohmann::json;

json ToWireRequest(const ChatRequest& request) {
  json messages = json::array();
  for (const Message& m : request.messages) {
    messages.push_back({{"role", RoleName(m.role)}, {"content", m.content}});
  }
  json body = {{"model", request.model_name},
               {"messages", std::move(messages)},
               {"temperature", request.temperature},
               {"max_tokens", request.max_output_tokens},
               {"stream", false}};
  if (request.seed_hint) body["seed"] = *request.seed_hint;
  return body;
}

absl::StatusOr<ChatResponse> FromWireResponse(const json& body) {
  try {
    const json& choice = body.at("choices").at(0);
    const json& message = choice.at("message");
    ChatResponse response;
    std::string content =
        message.contains("content") && message["content"].is_string()
            ? message["content"].get<std::string>()
            : std::string();
    if (message.contains("reasoning_content") &&
        message["reasoning_content"].is_string()) {
      content = StrCat("<think>\n", message["reasoning_content"].get<std::string>(),
                             "\n</think>\n", content);
    }
    response.content = std::move(content);
    std::string finish = choice.contains("finish_reason") && choice["finish_reason"].is_string()
                             ? choice["finish_reason"].get<std::string>()
                             : "stop";
    absl::StatusOr<FinishReason> reason = ParseFinishReason(finish);
    response.finish_reason = reason.ok() ? *reason : FinishReason::kStop;
    if (body.contains("usage") && body["usage"].is_object()) {
      response.usage.prompt_tokens = body["usage"].value("prompt_tokens", int64_t{0});
      response.usage.completion_tokens =
          body["usage"].value("completion_tokens", int64_t{0});
    }
    return response;
  } catch (const json::exception& e) {
    return absl::DataLossError(StrCat("malformed completion body: ", e.what()));
  }
}

absl::StatusOr<std::unique_ptr<HttpTransport>> HttpTransport::Create(
    HttpTransportOptions options) {
  std::string_view url = options.endpoint_url;
  size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    return absl::InvalidArgumentError(
        StrCat("endpoint_url lacks a scheme: '", url, "'"));
  }
  size_t path_start = url.find('/', scheme_end + 3);
  std::string base(url.substr(0, path_start));
  std::string path = path_start == std::string_view::npos
                         ? "/v1/chat/completions"
                         : std::string(url.substr(path_start));
  return std::unique_ptr<HttpTransport>(
      new HttpTransport(std::move(options), std::move(base), std::move(path)));
}

absl::StatusOr<ChatResponse> HttpTransport::Send(const ChatRequest& request) {
  httplib::Client client(base_);
  auto secs = static_cast<time_t>(options_.timeout_s);
  auto usecs = static_cast<time_t>((options_.timeout_s - secs) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", StrCat("Bearer ", options_.api_key));
  }
  httplib::Result result =
      client.Post(path_, headers, ToWireRequest(request).dump(), "application/json");
  if (!result) {
    return absl::UnavailableError(
        StrCat("request to ", base_, path_, " failed: ",
                     httplib::to_string(result.error())));
  }
  if (result->status < 200 || result->status >= 300) {
    return StatusFromHttp(result->status, result->body);
  }
  json body = json::parse(result->body, nullptr, false);
  if (body.is_discarded()) {
    return absl::DataLossError("completion body is not JSON");
  }
  return FromWireResponse(body);
}

std::string ExpandExtracts(std::string_view response, std::string_view request_text) {
  constexpr std::string_view kOpen = "{{extract:";
  std::string out;
  size_t pos = 0;
  while (true) {
    size_t open = response.find(kOpen, pos);
    if (open == std::string_view::npos) break;
    size_t close = response.find("}}", open);
    if (close == std::string_view::npos) break;
    out.append(response.substr(pos, open - pos));
    std::string_view spec = response.substr(open + kOpen.size(), close - open - kOpen.size());
    size_t bar = spec.find('|');
    std::string_view begin = spec.substr(0, bar);
    std::string_view end = bar == std::string_view::npos ? std::string_view() : spec.substr(bar + 1);
    size_t b = request_text.find(begin);
    if (b != std::string_view::npos) {
      b += begin.size();
      size_t e = end.empty() ? request_text.size() : request_text.find(end, b);
      if (e == std::string_view::npos) e = request_text.size();
      out.append(request_text.substr(b, e - b));
    }
    pos = close + 2;
  }
  out.append(response.substr(pos));
  return out;
}

absl::StatusOr<std::unique_ptr<FixtureTransport>> FixtureTransport::FromFile(
    const std::filesystem::path& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  json fixture = json::parse(*text, nullptr, false);
  if (fixture.is_discarded()) {
    return absl::InvalidArgumentError(
        StrCat("fixture ", path.string(), " is not valid JSON"));
  }
  return FromJson(fixture);
}

absl::StatusOr<std::unique_ptr<FixtureTransport>> FixtureTransport::FromJson(
    const json& fixture) {
  const json& rules_json = fixture.is_array() ? fixture : fixture.value("rules", json::array());
  std::vector<Rule> rules;
  try {
    auto parse_reply = [](const json& j) -> absl::StatusOr<Reply> {
      Reply reply;
      reply.status = j.value("status", 200);
      reply.response = j.value("response", std::string());
      absl::StatusOr<FinishReason> finish =
          ParseFinishReason(j.value("finish_reason", std::string("stop")));
      if (!finish.ok()) return finish.status();
      reply.finish_reason = *finish;
      return reply;
    };
    for (const json& r : rules_json) {
      Rule rule;
      if (r.contains("contains")) {
        if (r["contains"].is_string()) {
          rule.contains.push_back(r["contains"].get<std::string>());
        } else {
          rule.contains = r["contains"].get<std::vector<std::string>>();
        }
      }
      rule.model = r.value("model", std::string());
      if (r.contains("sequence")) {
        for (const json& s : r["sequence"]) {
          absl::StatusOr<Reply> reply = parse_reply(s);
          if (!reply.ok()) return reply.status();
          rule.replies.push_back(*std::move(reply));
        }
      } else {
        absl::StatusOr<Reply> reply = parse_reply(r);
        if (!reply.ok()) return reply.status();
        rule.replies.push_back(*std::move(reply));
      }
      if (rule.replies.empty()) {
        return absl::InvalidArgumentError("fixture rule has an empty sequence");
      }
      rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(StrCat("bad fixture: ", e.what()));
  }
  return std::unique_ptr<FixtureTransport>(new FixtureTransport(std::move(rules)));
}

absl::StatusOr<ChatResponse> FixtureTransport::Send(const ChatRequest& request) {
  std::string text;
  for (const Message& m : request.messages) {
    text += m.content;
    text += '\n';
  }
  Reply reply;
  {
    std::lock_guard<std::mutex> lock(mu_);
    Rule* hit = nullptr;
    for (Rule& rule : rules_) {
      if (!rule.model.empty() && rule.model != request.model_name) continue;
      bool all = true;
      for (const std::string& needle : rule.contains) {
        if (!Contains(text, needle)) {
          all = false;
          break;
        }
      }
      if (all) {
        hit = &rule;
        break;
      }
    }
    if (hit == nullptr) {
      return absl::NotFoundError("no fixture rule matches the request");
    }
    reply = hit->replies[std::min(hit->next, hit->replies.size() - 1)];
    ++hit->next;
  }
  if (reply.status < 200 || reply.status >= 300) {
    return StatusFromHttp(reply.status, reply.response);
  }
  ChatResponse response;
  response.content = ExpandExtracts(reply.response, text);
  response.finish_reason = reply.finish_reason;
  response.usage.prompt_tokens = static_cast<int64_t>(DefaultTokenizer().Count(text));
  response.usage.completion_tokens =
      static_cast<int64_t>(DefaultTokenizer().Count(response.content));
  return response;
}

}  // namespace forge::llm
