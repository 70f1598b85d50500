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

#ifndef FORGE_DATASET_DATASET_H_
#define FORGE_DATASET_DATASET_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "forge/common/tokenizer.h"
#include "nlohmann/json.hpp"

namespace forge::dataset {

struct TokenStats {
  size_t count = 0;
  double mean = 0;
  double median = 0;
  double p95 = 0;  // nearest-rank
  double max = 0;
};

nlohmann::json TokenStatsToJson(const TokenStats& stats);

// Errors on an empty input.
absl::StatusOr<TokenStats> ComputeTokenStats(std::vector<size_t> counts);

// Prompt plus trace (reasoning and answer) of one distilled record.
absl::StatusOr<size_t> RecordTokens(const nlohmann::json& record, const Tokenizer& tokenizer);

// Per-record token statistics of a distilled-example JSONL file. A malformed
// line is an error naming its line number.
absl::StatusOr<TokenStats> Stats(const std::filesystem::path& path,
                                 const Tokenizer& tokenizer = DefaultTokenizer());

// Completion:decompile parts.
struct MixRatio {
  int64_t completion_parts = 3;
  int64_t decompile_parts = 7;
};

absl::StatusOr<MixRatio> ParseRatio(std::string_view text);

// Largest-remainder split of `total`; the quotas always sum to `total`.
// An exact tie on the remainder goes to the completion side.
std::pair<size_t, size_t> SplitQuota(size_t total, const MixRatio& ratio);

struct DatasetManifest {
  std::string name;
  size_t records = 0;
  TokenStats token_stats;
  MixRatio mix_ratio;
  uint64_t seed = 0;
  size_t completion_quota = 0;
  size_t decompile_quota = 0;
  size_t completion_taken = 0;
  size_t decompile_taken = 0;
  size_t completion_shortfall = 0;
  size_t decompile_shortfall = 0;
  std::vector<std::string> source_hashes;
  std::vector<std::string> warnings;
};

nlohmann::json ManifestToJson(const DatasetManifest& manifest);

struct MixOptions {
  MixRatio ratio;
  size_t total = 0;
  uint64_t seed = 0;
  std::string name = "mixed";
};

struct MixResult {
  std::vector<std::string> lines;  // JSONL records in output order
  DatasetManifest manifest;
};

// Two passes per pool: count records, then stream out the sampled index
// set. Sampling is without replacement and the output order is a seeded
// shuffle of both selections. A pool smaller than its quota is taken whole
// and the gap recorded as a shortfall.
absl::StatusOr<MixResult> Mix(const std::filesystem::path& completion,
                              const std::filesystem::path& decompile, const MixOptions& options,
                              const Tokenizer& tokenizer = DefaultTokenizer());

// Quotas and shortfalls for given pool sizes, without reading records.
absl::StatusOr<DatasetManifest> PlanMix(size_t completion_pool, size_t decompile_pool,
                                        const MixOptions& options);

// Unbiased integer in [0, bound) from a 64-bit Mersenne Twister; portable,
// unlike std::uniform_int_distribution.
uint64_t UniformBelow(std::mt19937_64& rng, uint64_t bound);

template <typename T>
void SeededShuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[UniformBelow(rng, i)]);
  }
}

// Reduces a distilled record to {messages: [...]} for chat-format trainers.
nlohmann::json ToChatRecord(const nlohmann::json& record);

}  // namespace forge::dataset

#endif  // FORGE_DATASET_DATASET_H_
