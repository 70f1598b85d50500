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

#include "forge/eval/subprocess.h"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <thread>

#include "forge/common/strings.h"

extern char** environ;

namespace forge::eval {

namespace fs = std::filesystem;

namespace {

bool IsExecutableFile(const fs::path& p) {
  struct stat st;
  return ::stat(p.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(p.c_str(), X_OK) == 0;
}

}  // namespace

std::optional<fs::path> FindExecutable(std::string_view program) {
  if (program.empty()) return std::nullopt;
  if (Contains(program, "/")) {
    fs::path p(program);
    if (IsExecutableFile(p)) return p;
    return std::nullopt;
  }
  const char* path_env = std::getenv("PATH");
  std::string_view path = path_env ? path_env : "/usr/local/bin:/usr/bin:/bin";
  for (std::string_view dir : SplitString(path, ':')) {
    fs::path candidate = fs::path(dir.empty() ? "." : std::string(dir)) / std::string(program);
    if (IsExecutableFile(candidate)) return candidate;
  }
  return std::nullopt;
}

absl::StatusOr<ProcessOutcome> RunProcess(const ProcessSpec& spec) {
  using Clock = std::chrono::steady_clock;
  ProcessOutcome outcome;
  if (spec.argv.empty()) return absl::InvalidArgumentError("empty command line");
  // A relative path names a file inside the child's working directory.
  std::string program = spec.argv[0];
  if (Contains(program, "/") && fs::path(program).is_relative() && !spec.cwd.empty()) {
    program = (spec.cwd / program).string();
  }
  std::optional<fs::path> exe = FindExecutable(program);
  if (!exe) {
    outcome.kind = ProcessOutcome::Kind::kNotFound;
    return outcome;
  }

  // Everything the child touches is prepared before fork().
  std::string exe_path = exe->string();
  std::vector<char*> argv;
  for (const std::string& a : spec.argv) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  std::string cwd = spec.cwd.string();
  std::string out_path = spec.stdout_path.empty() ? "/dev/null" : spec.stdout_path.string();
  std::string err_path = spec.stderr_path.empty() ? "/dev/null" : spec.stderr_path.string();
  long open_max = ::sysconf(_SC_OPEN_MAX);
  const int max_fd = static_cast<int>(open_max > 0 && open_max < 65536 ? open_max : 65536);

  // Another thread may be writing an executable (a harness copy) at the
  // moment we fork; exec then fails with ETXTBSY until that writer closes.
  // The child reports exec errors through a close-on-exec pipe so the
  // parent can tell them apart from the tool's own exit codes.
  pid_t pid = -1;
  Clock::time_point start;
  for (int spawn_attempt = 0;; ++spawn_attempt) {
    int err_pipe[2];
    if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
      return absl::InternalError(StrCat("pipe failed: ", std::strerror(errno)));
    }
    start = Clock::now();
    pid = ::fork();
    if (pid < 0) {
      int e = errno;
      ::close(err_pipe[0]);
      ::close(err_pipe[1]);
      return absl::InternalError(StrCat("fork failed: ", std::strerror(e)));
    }
    if (pid == 0) {
      auto fail = [&](int e) {
        (void)!::write(err_pipe[1], &e, sizeof(e));
        ::_exit(127);
      };
      ::setpgid(0, 0);
      if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) fail(errno);
      int in = ::open("/dev/null", O_RDONLY);
      if (in < 0) fail(errno);
      int out = ::open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
      if (out < 0) fail(errno);
      int err = ::open(err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
      if (err < 0) fail(errno);
      ::dup2(in, STDIN_FILENO);
      ::dup2(out, STDOUT_FILENO);
      ::dup2(err, STDERR_FILENO);
      // Drop descriptors inherited from other threads so the tool never
      // holds someone else's files open.
      for (int fd = 3; fd < max_fd; ++fd) {
        if (fd != err_pipe[1]) ::close(fd);
      }
      ::execve(exe_path.c_str(), argv.data(), environ);
      fail(errno);
    }
    ::setpgid(pid, pid);
    ::close(err_pipe[1]);
    int child_errno = 0;
    ssize_t got;
    do {
      got = ::read(err_pipe[0], &child_errno, sizeof(child_errno));
    } while (got < 0 && errno == EINTR);
    ::close(err_pipe[0]);
    if (got <= 0) break;  // exec succeeded
    int ignored;
    ::waitpid(pid, &ignored, 0);
    if (child_errno == ETXTBSY && spawn_attempt < 50) {
      std::this_thread::sleep_for(std::chrono::milliseconds(2 + spawn_attempt));
      continue;
    }
    if (child_errno == ENOENT) {
      outcome.kind = ProcessOutcome::Kind::kNotFound;
      return outcome;
    }
    return absl::InternalError(
        StrCat("cannot start ", spec.argv[0], ": ", std::strerror(child_errno)));
  }

  auto deadline = start + std::chrono::duration_cast<Clock::duration>(
                              std::chrono::duration<double>(spec.timeout_s));
  int status = 0;
  auto sleep_for = std::chrono::milliseconds(1);
  while (true) {
    pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) break;
    if (done < 0 && errno != EINTR) {
      return absl::InternalError(StrCat("waitpid failed: ", std::strerror(errno)));
    }
    if (Clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      outcome.kind = ProcessOutcome::Kind::kTimedOut;
      outcome.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
      return outcome;
    }
    std::this_thread::sleep_for(sleep_for);
    sleep_for = std::min(sleep_for * 2, std::chrono::milliseconds(20));
  }
  ::kill(-pid, SIGKILL);
  outcome.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  if (WIFEXITED(status)) {
    outcome.kind = ProcessOutcome::Kind::kExited;
    outcome.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    outcome.kind = ProcessOutcome::Kind::kSignaled;
    outcome.signal = WTERMSIG(status);
  }
  return outcome;
}

}  // namespace forge::eval
