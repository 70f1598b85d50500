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

#ifndef FORGE_COMMON_TEXT_H_
#define FORGE_COMMON_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "forge/common/strings.h"

namespace forge {

bool IsValidUtf8(std::string_view text);

// Splits on '\n', dropping a trailing '\r' from each line. A final newline
// does not introduce an extra empty line; the empty string has zero lines.
std::vector<std::string_view> SplitLines(std::string_view text);

size_t CountLines(std::string_view text);

// Every line stripped of leading and trailing ASCII whitespace, joined with
// '\n'. Line count is preserved.
std::string NormalizeLines(std::string_view text);

// Collapses runs of whitespace to one space and strips the ends.
std::string CollapseWhitespace(std::string_view text);

// Truncates to at most `max_chars` code points, never splitting a UTF-8
// sequence.
std::string TruncateUtf8(std::string_view text, size_t max_chars);

// Removes `//` line comments and `/* */` block comments from C-family source
// (Scala, Verilog). String literals are respected.
std::string StripComments(std::string_view source);

}  // namespace forge

#endif  // FORGE_COMMON_TEXT_H_
