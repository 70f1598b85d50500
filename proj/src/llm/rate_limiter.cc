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

#include "forge/llm/rate_limiter.h"

#include <algorithm>
#include <map>
#include <thread>

namespace forge::llm {

RateLimiter::RateLimiter(double rate_per_s, double burst)
    : rate_(rate_per_s),
      capacity_(std::max(burst, 1.0)),
      tokens_(std::max(burst, 1.0)),
      last_(Clock::now()) {}

void RateLimiter::Acquire() {
  if (rate_ <= 0) return;
  while (true) {
    std::chrono::duration<double> wait{};
    {
      std::lock_guard<std::mutex> lock(mu_);
      Clock::time_point now = Clock::now();
      tokens_ = std::min(capacity_,
                         tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
      last_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    }
    std::this_thread::sleep_for(wait);
  }
}

std::shared_ptr<RateLimiter> RateLimiter::ForEndpoint(const std::string& key,
                                                      double rate_per_s, double burst) {
  static std::mutex mu;
  static auto* registry = new std::map<std::string, std::shared_ptr<RateLimiter>>();
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = (*registry)[key];
  if (!slot) slot = std::make_shared<RateLimiter>(rate_per_s, burst);
  return slot;
}

}  // namespace forge::llm
