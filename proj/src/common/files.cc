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

#include "forge/common/files.h"

#include <unistd.h>

#include <atomic>
#include <fstream>
#include <sstream>
#include <system_error>

#include "absl/strings/ascii.h"
#include "forge/common/strings.h"

namespace forge {

namespace fs = std::filesystem;

absl::StatusOr<std::string> ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(StrCat("cannot open ", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    return absl::DataLossError(StrCat("read failed: ", path.string()));
  }
  return buffer.str();
}

absl::Status WriteFileAtomic(const fs::path& path, std::string_view content) {
  static std::atomic<uint64_t> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  fs::path tmp = path;
  tmp += StrCat(".tmp.", ::getpid(), ".", counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::PermissionDeniedError(
          StrCat("cannot write ", tmp.string()));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp, ec);
      return absl::DataLossError(StrCat("write failed: ", tmp.string()));
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    return absl::InternalError(
        StrCat("rename to ", path.string(), " failed: ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<nlohmann::json>> ParseJsonl(std::string_view text) {
  std::vector<nlohmann::json> records;
  size_t line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = StripWhitespace(text.substr(start, end - start));
    if (!line.empty()) {
      nlohmann::json value = nlohmann::json::parse(line, nullptr, false);
      if (value.is_discarded()) {
        return absl::InvalidArgumentError(
            StrCat("malformed JSON on line ", line_no));
      }
      records.push_back(std::move(value));
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return records;
}

absl::StatusOr<std::vector<nlohmann::json>> ReadJsonl(const fs::path& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  absl::StatusOr<std::vector<nlohmann::json>> records = ParseJsonl(*text);
  if (!records.ok()) {
    return absl::InvalidArgumentError(
        StrCat(path.string(), ": ", records.status().message()));
  }
  return records;
}

std::string ToJsonl(const std::vector<nlohmann::json>& records) {
  std::string out;
  for (const nlohmann::json& record : records) {
    out += record.dump();
    out += '\n';
  }
  return out;
}

absl::Status WriteJsonl(const fs::path& path,
                        const std::vector<nlohmann::json>& records) {
  return WriteFileAtomic(path, ToJsonl(records));
}

}  // namespace forge
