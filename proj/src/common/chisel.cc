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

#include "forge/common/chisel.h"

#include <set>

#include "absl/strings/ascii.h"
#include "forge/common/strings.h"
#include "forge/common/text.h"

namespace forge {
namespace {

bool IsIdentChar(char c) {
  return absl::ascii_isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string_view ReadIdent(std::string_view s, size_t pos) {
  size_t end = pos;
  while (end < s.size() && IsIdentChar(s[end])) ++end;
  return s.substr(pos, end - pos);
}

bool PrecededByWord(std::string_view s, size_t pos, std::string_view word) {
  std::string_view before = StripTrailingWhitespace(s.substr(0, pos));
  if (!before.ends_with(word)) return false;
  size_t start = before.size() - word.size();
  return start == 0 || !IsIdentChar(before[start - 1]);
}

const std::set<std::string, std::less<>>& ModuleBases() {
  static const auto* bases = new std::set<std::string, std::less<>>{
      "Module", "RawModule", "MultiIOModule", "LegacyModule", "ExtModule", "BlackBox"};
  return *bases;
}

}  // namespace

std::vector<ModuleClass> FindModuleClasses(std::string_view raw) {
  std::string source = StripComments(raw);
  std::string_view s = source;
  std::set<std::string, std::less<>> module_like = ModuleBases();
  std::vector<ModuleClass> out;
  for (size_t pos = s.find("class"); pos != std::string_view::npos; pos = s.find("class", pos + 5)) {
    if (pos > 0 && IsIdentChar(s[pos - 1])) continue;
    if (pos + 5 >= s.size() || !absl::ascii_isspace(static_cast<unsigned char>(s[pos + 5]))) continue;
    size_t name_pos = pos + 5;
    while (name_pos < s.size() && absl::ascii_isspace(static_cast<unsigned char>(s[name_pos]))) ++name_pos;
    std::string_view name = ReadIdent(s, name_pos);
    if (name.empty()) continue;
    // Header runs to the body brace, or to the end of a body-less declaration.
    size_t header_end = s.find_first_of("{\n", name_pos);
    size_t brace = s.find('{', name_pos);
    size_t extends = s.find("extends", name_pos);
    if (extends == std::string_view::npos) continue;
    if (brace != std::string_view::npos && extends > brace) continue;
    if (brace == std::string_view::npos && header_end != std::string_view::npos &&
        extends > header_end) {
      continue;
    }
    // Parameter lists may span lines, so look for the base right after
    // `extends` rather than restricting to one line.
    size_t base_pos = extends + 7;
    while (base_pos < s.size() && absl::ascii_isspace(static_cast<unsigned char>(s[base_pos]))) ++base_pos;
    std::string_view base = ReadIdent(s, base_pos);
    if (base.empty() || !module_like.count(base)) continue;
    ModuleClass m;
    m.name = std::string(name);
    m.base = std::string(base);
    m.is_abstract = PrecededByWord(s, pos, "abstract");
    m.offset = pos;
    module_like.insert(m.name);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<FencedBlock> FindFencedBlocks(std::string_view text) {
  std::vector<FencedBlock> blocks;
  size_t pos = 0;
  bool open = false;
  FencedBlock current;
  std::string fence;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    size_t next = eol == std::string_view::npos ? text.size() : eol + 1;
    std::string_view line = text.substr(pos, next - pos);
    std::string_view trimmed = StripWhitespace(line);
    if (!open) {
      if (trimmed.starts_with("```") || trimmed.starts_with("~~~")) {
        open = true;
        fence = std::string(trimmed.substr(0, 3));
        current = FencedBlock();
        current.info = std::string(StripWhitespace(trimmed.substr(3)));
        current.begin = pos;
      }
    } else if (trimmed == fence || (trimmed.starts_with(fence) &&
                                    StripWhitespace(trimmed.substr(3)).empty())) {
      current.end = next;
      blocks.push_back(std::move(current));
      open = false;
    } else {
      current.body.append(line);
    }
    pos = next;
  }
  if (open) {
    current.end = text.size();
    blocks.push_back(std::move(current));
  }
  return blocks;
}

}  // namespace forge
