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

#ifndef FORGE_COMMON_STATUS_MACROS_H_
#define FORGE_COMMON_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define FORGE_STATUS_CONCAT_INNER(a, b) a##b
#define FORGE_STATUS_CONCAT(a, b) FORGE_STATUS_CONCAT_INNER(a, b)

#define FORGE_RETURN_IF_ERROR(expr)            \
  do {                                         \
    ::absl::Status forge_status_ = (expr);     \
    if (!forge_status_.ok()) {                 \
      return forge_status_;                    \
    }                                          \
  } while (false)

#define FORGE_ASSIGN_OR_RETURN_IMPL(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                \
  if (!statusor.ok()) {                                   \
    return std::move(statusor).status();                  \
  }                                                       \
  lhs = std::move(statusor).value()

#define FORGE_ASSIGN_OR_RETURN(lhs, rexpr) \
  FORGE_ASSIGN_OR_RETURN_IMPL(             \
      FORGE_STATUS_CONCAT(forge_statusor_, __LINE__), lhs, rexpr)

#endif  // FORGE_COMMON_STATUS_MACROS_H_
