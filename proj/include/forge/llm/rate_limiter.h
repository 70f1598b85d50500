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

#ifndef FORGE_LLM_RATE_LIMITER_H_
#define FORGE_LLM_RATE_LIMITER_H_

#include <chrono>
#include <memory>
#include <mutex>
#include <string>

namespace forge::llm {

// Token bucket. Acquire() blocks until a token is available.
class RateLimiter {
 public:
  // rate_per_s <= 0 disables limiting.
  RateLimiter(double rate_per_s, double burst);

  void Acquire();

  // Shared bucket per endpoint key, so separate clients hitting the same
  // endpoint draw from one budget. The first caller's parameters win.
  static std::shared_ptr<RateLimiter> ForEndpoint(const std::string& key,
                                                  double rate_per_s,
                                                  double burst);

 private:
  using Clock = std::chrono::steady_clock;

  std::mutex mu_;
  double rate_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
};

}  // namespace forge::llm

#endif  // FORGE_LLM_RATE_LIMITER_H_
