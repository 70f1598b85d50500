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

#include "forge/common/tokenizer.h"

#include "absl/strings/ascii.h"

namespace forge {
namespace {

bool IsWordByte(unsigned char c) {
  return c >= 0x80 || absl::ascii_isalnum(c) || c == '_';
}

template <typename Sink>
void Segment(std::string_view text, Sink&& sink) {
  size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (absl::ascii_isspace(c) || absl::ascii_iscntrl(c)) {
      ++i;
    } else if (IsWordByte(c)) {
      size_t j = i + 1;
      while (j < text.size() && IsWordByte(static_cast<unsigned char>(text[j]))) ++j;
      sink(text.substr(i, j - i));
      i = j;
    } else {
      sink(text.substr(i, 1));
      ++i;
    }
  }
}

}  // namespace

std::vector<std::string> WordPunctTokenizer::Tokenize(std::string_view text) const {
  std::vector<std::string> tokens;
  Segment(text, [&](std::string_view t) { tokens.emplace_back(t); });
  return tokens;
}

size_t WordPunctTokenizer::Count(std::string_view text) const {
  size_t n = 0;
  Segment(text, [&](std::string_view) { ++n; });
  return n;
}

const Tokenizer& DefaultTokenizer() {
  static const WordPunctTokenizer* tokenizer = new WordPunctTokenizer();
  return *tokenizer;
}

}  // namespace forge
