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

#include "forge/dataset/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "forge/common/files.h"
#include "forge/common/hash.h"
#include "forge/common/status_macros.h"
#include "forge/common/strings.h"

namespace forge::dataset {

namespace fs = std::filesystem;
using nlohmann::json;

json TokenStatsToJson(const TokenStats& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"median", s.median},
          {"p95", s.p95},     {"max", s.max}};
}

absl::StatusOr<TokenStats> ComputeTokenStats(std::vector<size_t> counts) {
  if (counts.empty()) return absl::InvalidArgumentError("no records to characterize");
  std::sort(counts.begin(), counts.end());
  TokenStats s;
  s.count = counts.size();
  long double sum = 0;
  for (size_t c : counts) sum += c;
  s.mean = static_cast<double>(sum / counts.size());
  size_t n = counts.size();
  s.median = n % 2 == 1 ? static_cast<double>(counts[n / 2])
                        : (static_cast<double>(counts[n / 2 - 1]) + counts[n / 2]) / 2.0;
  size_t rank = static_cast<size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = static_cast<double>(counts[std::clamp<size_t>(rank, 1, n) - 1]);
  s.max = static_cast<double>(counts.back());
  return s;
}

absl::StatusOr<size_t> RecordTokens(const json& record, const Tokenizer& tokenizer) {
  if (!record.is_object() || !record.contains("prompt_text") ||
      !record["prompt_text"].is_string()) {
    return absl::InvalidArgumentError("record lacks prompt_text");
  }
  size_t n = tokenizer.Count(record["prompt_text"].get<std::string>());
  if (record.contains("trace") && record["trace"].is_object()) {
    const json& t = record["trace"];
    if (t.contains("think") && t["think"].is_string()) n += tokenizer.Count(t["think"].get<std::string>());
    if (t.contains("answer") && t["answer"].is_string()) n += tokenizer.Count(t["answer"].get<std::string>());
  }
  return n;
}

namespace {

// Calls fn(index, line) for every non-blank line; errors name the 1-based
// physical line.
template <typename Fn>
absl::Status ForEachRecord(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(StrCat("cannot open ", path.string()));
  std::string line;
  size_t line_no = 0;
  size_t index = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (StripWhitespace(line).empty()) continue;
    absl::Status st = fn(index++, line, line_no);
    if (!st.ok()) return st;
  }
  return absl::OkStatus();
}

absl::StatusOr<json> ParseRecord(const fs::path& path, const std::string& line, size_t line_no) {
  json record = json::parse(line, nullptr, false);
  if (record.is_discarded()) {
    return absl::InvalidArgumentError(
        StrCat(path.string(), ": malformed JSON on line ", line_no));
  }
  return record;
}

absl::StatusOr<size_t> CountRecords(const fs::path& path) {
  size_t n = 0;
  FORGE_RETURN_IF_ERROR(ForEachRecord(path, [&](size_t, const std::string&, size_t) {
    ++n;
    return absl::OkStatus();
  }));
  return n;
}

// Sorted sample of `k` distinct indices from [0, n).
std::vector<size_t> SampleIndices(size_t n, size_t k, std::mt19937_64& rng) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  for (size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + UniformBelow(rng, n - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

absl::StatusOr<std::vector<std::string>> CollectLines(const fs::path& path,
                                                      const std::vector<size_t>& wanted) {
  std::vector<std::string> out;
  out.reserve(wanted.size());
  size_t cursor = 0;
  FORGE_RETURN_IF_ERROR(ForEachRecord(path, [&](size_t index, const std::string& line, size_t) {
    if (cursor < wanted.size() && wanted[cursor] == index) {
      out.push_back(line);
      ++cursor;
    }
    return absl::OkStatus();
  }));
  return out;
}

}  // namespace

absl::StatusOr<TokenStats> Stats(const fs::path& path, const Tokenizer& tokenizer) {
  std::vector<size_t> counts;
  FORGE_RETURN_IF_ERROR(
      ForEachRecord(path, [&](size_t, const std::string& line, size_t line_no) -> absl::Status {
        FORGE_ASSIGN_OR_RETURN(json record, ParseRecord(path, line, line_no));
        absl::StatusOr<size_t> tokens = RecordTokens(record, tokenizer);
        if (!tokens.ok()) {
          return absl::InvalidArgumentError(StrCat(path.string(), ": line ", line_no, ": ",
                                                   tokens.status().message()));
        }
        counts.push_back(*tokens);
        return absl::OkStatus();
      }));
  return ComputeTokenStats(std::move(counts));
}

absl::StatusOr<MixRatio> ParseRatio(std::string_view text) {
  size_t colon = text.find(':');
  if (colon == std::string_view::npos) {
    return absl::InvalidArgumentError(StrCat("ratio must look like C:D, got '", text, "'"));
  }
  MixRatio r;
  std::string_view a = StripWhitespace(text.substr(0, colon));
  std::string_view b = StripWhitespace(text.substr(colon + 1));
  auto ra = std::from_chars(a.data(), a.data() + a.size(), r.completion_parts);
  auto rb = std::from_chars(b.data(), b.data() + b.size(), r.decompile_parts);
  if (ra.ec != std::errc() || ra.ptr != a.data() + a.size() || rb.ec != std::errc() ||
      rb.ptr != b.data() + b.size()) {
    return absl::InvalidArgumentError(StrCat("ratio must look like C:D, got '", text, "'"));
  }
  if (r.completion_parts < 0 || r.decompile_parts < 0) {
    return absl::InvalidArgumentError("ratio parts must be non-negative");
  }
  if (r.completion_parts + r.decompile_parts <= 0) {
    return absl::InvalidArgumentError("ratio parts must not both be zero");
  }
  return r;
}

std::pair<size_t, size_t> SplitQuota(size_t total, const MixRatio& ratio) {
  using u128 = unsigned __int128;
  u128 parts = static_cast<u128>(ratio.completion_parts + ratio.decompile_parts);
  u128 c_num = static_cast<u128>(total) * static_cast<u128>(ratio.completion_parts);
  u128 d_num = static_cast<u128>(total) * static_cast<u128>(ratio.decompile_parts);
  size_t c = static_cast<size_t>(c_num / parts);
  size_t d = static_cast<size_t>(d_num / parts);
  size_t left = total - c - d;  // 0 or 1 with two parts
  if (left > 0) {
    u128 c_rem = c_num % parts;
    u128 d_rem = d_num % parts;
    if (c_rem >= d_rem) ++c; else ++d;
  }
  return {c, d};
}

json ManifestToJson(const DatasetManifest& m) {
  return {{"name", m.name},
          {"records", m.records},
          {"token_stats", TokenStatsToJson(m.token_stats)},
          {"mix_ratio", {m.mix_ratio.completion_parts, m.mix_ratio.decompile_parts}},
          {"seed", m.seed},
          {"quota", {{"completion", m.completion_quota}, {"decompile", m.decompile_quota}}},
          {"taken", {{"completion", m.completion_taken}, {"decompile", m.decompile_taken}}},
          {"shortfall",
           {{"completion", m.completion_shortfall}, {"decompile", m.decompile_shortfall}}},
          {"source_hashes", m.source_hashes},
          {"warnings", m.warnings}};
}

uint64_t UniformBelow(std::mt19937_64& rng, uint64_t bound) {
  if (bound <= 1) return 0;
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % bound;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

absl::StatusOr<DatasetManifest> PlanMix(size_t completion_pool, size_t decompile_pool,
                                        const MixOptions& o) {
  if (o.total == 0) return absl::InvalidArgumentError("total must be positive");
  if (o.ratio.completion_parts < 0 || o.ratio.decompile_parts < 0 ||
      o.ratio.completion_parts + o.ratio.decompile_parts <= 0) {
    return absl::InvalidArgumentError("ratio parts must be non-negative with a positive sum");
  }
  DatasetManifest m;
  m.name = o.name;
  m.mix_ratio = o.ratio;
  m.seed = o.seed;
  std::tie(m.completion_quota, m.decompile_quota) = SplitQuota(o.total, o.ratio);
  if (m.completion_quota > 0 && completion_pool == 0) {
    return absl::InvalidArgumentError("completion pool is empty");
  }
  if (m.decompile_quota > 0 && decompile_pool == 0) {
    return absl::InvalidArgumentError("decompile pool is empty");
  }
  m.completion_taken = std::min(m.completion_quota, completion_pool);
  m.decompile_taken = std::min(m.decompile_quota, decompile_pool);
  m.completion_shortfall = m.completion_quota - m.completion_taken;
  m.decompile_shortfall = m.decompile_quota - m.decompile_taken;
  if (m.completion_shortfall > 0) {
    m.warnings.push_back(StrCat("completion pool has ", completion_pool, " records for a quota of ",
                                m.completion_quota, "; shortfall ", m.completion_shortfall));
  }
  if (m.decompile_shortfall > 0) {
    m.warnings.push_back(StrCat("decompile pool has ", decompile_pool, " records for a quota of ",
                                m.decompile_quota, "; shortfall ", m.decompile_shortfall));
  }
  m.records = m.completion_taken + m.decompile_taken;
  return m;
}

absl::StatusOr<MixResult> Mix(const fs::path& completion, const fs::path& decompile,
                              const MixOptions& options, const Tokenizer& tokenizer) {
  FORGE_ASSIGN_OR_RETURN(size_t c_pool, CountRecords(completion));
  FORGE_ASSIGN_OR_RETURN(size_t d_pool, CountRecords(decompile));
  if (c_pool == 0) return absl::InvalidArgumentError("completion pool is empty");
  if (d_pool == 0) return absl::InvalidArgumentError("decompile pool is empty");
  FORGE_ASSIGN_OR_RETURN(DatasetManifest manifest, PlanMix(c_pool, d_pool, options));

  std::mt19937_64 rng(options.seed);
  std::vector<size_t> c_idx = SampleIndices(c_pool, manifest.completion_taken, rng);
  std::vector<size_t> d_idx = SampleIndices(d_pool, manifest.decompile_taken, rng);
  FORGE_ASSIGN_OR_RETURN(std::vector<std::string> c_lines, CollectLines(completion, c_idx));
  FORGE_ASSIGN_OR_RETURN(std::vector<std::string> d_lines, CollectLines(decompile, d_idx));

  MixResult result;
  result.lines = std::move(c_lines);
  result.lines.insert(result.lines.end(), std::make_move_iterator(d_lines.begin()),
                      std::make_move_iterator(d_lines.end()));
  SeededShuffle(result.lines, rng);

  std::vector<size_t> counts;
  std::set<std::string> ids;
  size_t duplicate_ids = 0;
  for (const std::string& line : result.lines) {
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded()) return absl::InvalidArgumentError("mixed record is not JSON");
    FORGE_ASSIGN_OR_RETURN(size_t tokens, RecordTokens(record, tokenizer));
    counts.push_back(tokens);
    if (record.contains("sample_id") && record["sample_id"].is_string() &&
        !ids.insert(record["sample_id"].get<std::string>()).second) {
      ++duplicate_ids;
    }
  }
  if (duplicate_ids > 0) {
    manifest.warnings.push_back(StrCat(duplicate_ids, " output records repeat a sample_id"));
  }
  FORGE_ASSIGN_OR_RETURN(manifest.token_stats, ComputeTokenStats(std::move(counts)));
  for (const fs::path& p : {completion, decompile}) {
    FORGE_ASSIGN_OR_RETURN(std::string digest, Sha256File(p));
    manifest.source_hashes.push_back(std::move(digest));
  }
  manifest.records = result.lines.size();
  result.manifest = std::move(manifest);
  return result;
}

json ToChatRecord(const json& record) {
  if (record.contains("messages")) return {{"messages", record["messages"]}};
  return record;
}

}  // namespace forge::dataset
