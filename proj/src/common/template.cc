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

#include "forge/common/template.h"

#include "absl/status/status.h"
#include "forge/common/strings.h"

namespace forge {
namespace {

constexpr std::string_view kOpen = "{{";
constexpr std::string_view kClose = "}}";

}  // namespace

absl::StatusOr<std::string> RenderTemplate(std::string_view tmpl,
                                           const TemplateVars& vars) {
  std::string out;
  size_t pos = 0;
  while (pos < tmpl.size()) {
    size_t open = tmpl.find(kOpen, pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    size_t close = tmpl.find(kClose, open + kOpen.size());
    if (close == std::string_view::npos) {
      return absl::InvalidArgumentError("unterminated placeholder in template");
    }
    std::string_view tag = tmpl.substr(open + 2, close - open - 2);
    pos = close + kClose.size();
    if (tag.empty()) {
      return absl::InvalidArgumentError("empty placeholder in template");
    }
    if (tag.front() == '/') {
      return absl::InvalidArgumentError(
          StrCat("unmatched section end '", tag, "'"));
    }
    bool section = tag.front() == '#';
    std::string_view name = section ? tag.substr(1) : tag;
    auto it = vars.find(name);
    if (it == vars.end()) {
      return absl::InvalidArgumentError(
          StrCat("template references unbound name '", name, "'"));
    }
    if (!section) {
      out.append(it->second);
      continue;
    }
    std::string end_tag = StrCat("{{/", name, "}}");
    size_t end = tmpl.find(end_tag, pos);
    if (end == std::string_view::npos) {
      return absl::InvalidArgumentError(
          StrCat("section '", name, "' is not closed"));
    }
    if (!it->second.empty()) {
      absl::StatusOr<std::string> inner = RenderTemplate(tmpl.substr(pos, end - pos), vars);
      if (!inner.ok()) return inner.status();
      out.append(*inner);
    }
    pos = end + end_tag.size();
  }
  return out;
}

}  // namespace forge
