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

#ifndef FORGE_EVAL_SUBPROCESS_H_
#define FORGE_EVAL_SUBPROCESS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace forge::eval {

// Resolves a program the way a shell would: names containing '/' are taken
// as paths, anything else is searched on PATH. Only executable regular
// files qualify.
std::optional<std::filesystem::path> FindExecutable(std::string_view program);

struct ProcessSpec {
  std::vector<std::string> argv;
  std::filesystem::path cwd;
  double timeout_s = 60.0;
  // Output is written here (created or truncated).
  std::filesystem::path stdout_path;
  std::filesystem::path stderr_path;
};

struct ProcessOutcome {
  enum class Kind { kExited, kSignaled, kTimedOut, kNotFound };
  Kind kind = Kind::kExited;
  int exit_code = -1;
  int signal = 0;
  double wall_time_s = 0;

  bool succeeded() const { return kind == Kind::kExited && exit_code == 0; }
};

// Runs the command in its own process group. On timeout the whole group is
// sent SIGKILL, so grandchildren die with it; after a normal exit any
// processes left in the group are killed as well.
absl::StatusOr<ProcessOutcome> RunProcess(const ProcessSpec& spec);

}  // namespace forge::eval

#endif  // FORGE_EVAL_SUBPROCESS_H_
