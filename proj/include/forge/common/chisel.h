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

#ifndef FORGE_COMMON_CHISEL_H_
#define FORGE_COMMON_CHISEL_H_

#include <string>
#include <string_view>
#include <vector>

namespace forge {

// A `class` declaration whose header (up to the body brace) extends one of
// the Chisel module bases, directly or through a class declared earlier in
// the same source.
struct ModuleClass {
  std::string name;
  std::string base;
  bool is_abstract = false;
  size_t offset = 0;
};

// Declaration order. Comments and string literals are ignored.
std::vector<ModuleClass> FindModuleClasses(std::string_view source);

inline bool HasModuleDefinition(std::string_view source) {
  return !FindModuleClasses(source).empty();
}

struct FencedBlock {
  std::string info;  // text after the opening fence, e.g. "scala"
  std::string body;
  size_t begin = 0;  // offset of the opening fence
  size_t end = 0;    // offset one past the closing fence line
};

// Markdown ``` / ~~~ fenced blocks in order. An unterminated final block
// runs to the end of the text.
std::vector<FencedBlock> FindFencedBlocks(std::string_view text);

}  // namespace forge

#endif  // FORGE_COMMON_CHISEL_H_
