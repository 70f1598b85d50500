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

#ifndef FORGE_TESTS_PASSK_ORACLE_H_
#define FORGE_TESTS_PASSK_ORACLE_H_

#include <bit>
#include <cstdint>
#include <vector>

namespace forge::testing {

// Exhaustive pass@k for one (n, c): the first c attempts are the correct
// ones, and entry k is the fraction of all k-subsets holding at least one
// of them. Index 0 is unused.
inline std::vector<double> EnumeratedPassAtK(int n, int c) {
  std::vector<uint64_t> total(n + 1, 0);
  std::vector<uint64_t> hit(n + 1, 0);
  const uint32_t correct = (c == 0) ? 0u : ((1u << c) - 1u);
  for (uint32_t mask = 0; mask < (1u << n); ++mask) {
    int k = std::popcount(mask);
    ++total[k];
    if (mask & correct) ++hit[k];
  }
  std::vector<double> out(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) out[k] = static_cast<double>(hit[k]) / static_cast<double>(total[k]);
  return out;
}

}  // namespace forge::testing

#endif  // FORGE_TESTS_PASSK_ORACLE_H_
