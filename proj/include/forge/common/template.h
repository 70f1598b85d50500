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

#ifndef FORGE_COMMON_TEMPLATE_H_
#define FORGE_COMMON_TEMPLATE_H_

#include <map>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace forge {

// Minimal placeholder templating for operator-editable prompt files.
//
//   {{name}}              replaced by the value of `name`
//   {{#name}}...{{/name}} kept only when `name` is bound to non-empty text
//
// Referencing an unbound name is an error, which catches typos in edited
// template files early. Sections do not nest with the same name.
using TemplateVars = std::map<std::string, std::string, std::less<>>;

absl::StatusOr<std::string> RenderTemplate(std::string_view tmpl,
                                           const TemplateVars& vars);

}  // namespace forge

#endif  // FORGE_COMMON_TEMPLATE_H_
