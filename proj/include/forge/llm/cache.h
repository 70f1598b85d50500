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

#ifndef FORGE_LLM_CACHE_H_
#define FORGE_LLM_CACHE_H_

#include <atomic>
#include <filesystem>
#include <optional>
#include <string>

#include "absl/status/status.h"
#include "forge/llm/chat.h"

namespace forge::llm {

// Content-addressed response store: <dir>/<key[0:2]>/<key>.json. Entries
// are written atomically; an unreadable entry is treated as a miss.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::optional<ChatResponse> Lookup(const std::string& key) const;
  absl::Status Store(const std::string& key, const ChatRequest& request,
                     const ChatResponse& response) const;

  std::filesystem::path EntryPath(const std::string& key) const;
  int64_t corrupt_entries() const { return corrupt_.load(); }

 private:
  std::filesystem::path dir_;
  mutable std::atomic<int64_t> corrupt_{0};
};

}  // namespace forge::llm

#endif  // FORGE_LLM_CACHE_H_
