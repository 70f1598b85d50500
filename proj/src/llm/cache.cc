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

#include "forge/llm/cache.h"

#include <spdlog/spdlog.h>

#include "forge/common/files.h"

namespace forge::llm {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path ResponseCache::EntryPath(const std::string& key) const {
  return dir_ / key.substr(0, 2) / (key + ".json");
}

std::optional<ChatResponse> ResponseCache::Lookup(const std::string& key) const {
  fs::path path = EntryPath(key);
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  absl::StatusOr<std::string> text = ReadFile(path);
  if (text.ok()) {
    json entry = json::parse(*text, nullptr, false);
    if (!entry.is_discarded() && entry.is_object() && entry.value("key", "") == key &&
        entry.contains("response")) {
      absl::StatusOr<ChatResponse> response = ResponseFromJson(entry["response"]);
      if (response.ok()) {
        response->cached = true;
        return *std::move(response);
      }
    }
  }
  corrupt_.fetch_add(1);
  spdlog::warn("cache entry {} is corrupt; bypassing cache", path.string());
  return std::nullopt;
}

absl::Status ResponseCache::Store(const std::string& key, const ChatRequest& request,
                                  const ChatResponse& response) const {
  json entry = {{"key", key},
                {"request", RequestToJson(request)},
                {"response", ResponseToJson(response)}};
  return WriteFileAtomic(EntryPath(key), entry.dump(2));
}

}  // namespace forge::llm
