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

#ifndef FORGE_COMMON_HASH_H_
#define FORGE_COMMON_HASH_H_

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace forge {

// Lowercase hex SHA-256 digest of `data`.
std::string Sha256Hex(std::string_view data);

// Digest over several fields. Each part is length-prefixed so that
// ("ab", "c") and ("a", "bc") hash differently.
std::string HashFields(std::initializer_list<std::string_view> parts);

// Streams the file through SHA-256.
absl::StatusOr<std::string> Sha256File(const std::filesystem::path& path);

}  // namespace forge

#endif  // FORGE_COMMON_HASH_H_
