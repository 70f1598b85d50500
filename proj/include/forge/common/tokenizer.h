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

#ifndef FORGE_COMMON_TOKENIZER_H_
#define FORGE_COMMON_TOKENIZER_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace forge {

// Token counting used for length screening and dataset statistics. A
// model-specific tokenizer can be substituted by implementing this interface.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> Tokenize(std::string_view text) const = 0;
  virtual size_t Count(std::string_view text) const {
    return Tokenize(text).size();
  }
};

// Whitespace separates tokens; a maximal run of word characters (ASCII
// alphanumerics, '_', and any non-ASCII byte) is one token; every other
// printable character is a token on its own.
class WordPunctTokenizer : public Tokenizer {
 public:
  std::vector<std::string> Tokenize(std::string_view text) const override;
  size_t Count(std::string_view text) const override;
};

const Tokenizer& DefaultTokenizer();

}  // namespace forge

#endif  // FORGE_COMMON_TOKENIZER_H_
