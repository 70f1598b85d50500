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

#ifndef FORGE_COMMON_FILES_H_
#define FORGE_COMMON_FILES_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace forge {

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partially written file.
absl::Status WriteFileAtomic(const std::filesystem::path& path,
                             std::string_view content);

// Parses one JSON value per non-blank line. Errors name the 1-based line.
absl::StatusOr<std::vector<nlohmann::json>> ReadJsonl(
    const std::filesystem::path& path);
absl::StatusOr<std::vector<nlohmann::json>> ParseJsonl(std::string_view text);

std::string ToJsonl(const std::vector<nlohmann::json>& records);

absl::Status WriteJsonl(const std::filesystem::path& path,
                        const std::vector<nlohmann::json>& records);

}  // namespace forge

#endif  // FORGE_COMMON_FILES_H_
