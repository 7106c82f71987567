// Copyright 2026 The hwnas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "hwnas/profiler.hpp"

namespace hwnas {

namespace {

struct CommandResult {
  std::string output;
  int status = 0;
};

CommandResult run_command(const std::string& command, double timeout_s) {
  int fds[2];
  if (pipe(fds) != 0) throw Error(ErrorCode::kDeviceError, "pipe failed");
  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw Error(ErrorCode::kDeviceError, "fork failed");
  }
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(fds[1]);
  CommandResult result;
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
  std::array<char, 4096> buf{};
  bool timed_out = false;
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{fds[0], POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(left.count()));
    if (ready < 0 && errno == EINTR) continue;
    if (ready <= 0) {
      timed_out = ready == 0;
      break;
    }
    const ssize_t got = read(fds[0], buf.data(), buf.size());
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) break;
    result.output.append(buf.data(), static_cast<std::size_t>(got));
  }
  close(fds[0]);
  if (timed_out) kill(pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) {
    throw Error(ErrorCode::kDeviceError, "command timed out after " + std::to_string(timeout_s) + " s: " + command);
  }
  result.status = status;
  return result;
}

std::vector<double> parse_latencies(const std::string& output) {
  std::vector<double> values;
  std::istringstream in(output);
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* begin = line.data() + first;
    const char* end = line.data() + last + 1;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kDeviceError, "unparseable latency line: '" + line + "'");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace

ExternalCommandRunner::ExternalCommandRunner(ExternalRunnerConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.command.empty()) throw Error(ErrorCode::kInvalidArgument, "external runner: empty command");
  if (!(cfg_.timeout_s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "external runner: timeout must be positive");
}

std::vector<double> ExternalCommandRunner::run(const CompactNet& subgraph, int trials) {
  if (trials < 1) throw Error(ErrorCode::kDeviceError, "external runner: trials must be positive");
  std::string path_template = (std::filesystem::temp_directory_path() / "hwnas-XXXXXX.net.json").string();
  const int fd = mkstemps(path_template.data(), 9);
  if (fd < 0) throw Error(ErrorCode::kIoError, "cannot create temporary subgraph file");
  close(fd);
  const std::string path = path_template;
  struct Cleanup {
    std::string path;
    ~Cleanup() { std::filesystem::remove(path); }
  } cleanup{path};
  save_text(path, serialize(subgraph));

  std::string command = cfg_.command;
  for (std::size_t pos = command.find("{graph}"); pos != std::string::npos; pos = command.find("{graph}", pos)) {
    command.replace(pos, 7, path);
    pos += path.size();
  }

  std::vector<double> samples;
  while (samples.size() < static_cast<std::size_t>(trials)) {
    const CommandResult r = run_command(command, cfg_.timeout_s);
    if (!WIFEXITED(r.status) || WEXITSTATUS(r.status) != 0) {
      throw Error(ErrorCode::kDeviceError, "command failed (status " + std::to_string(r.status) + "): " + command);
    }
    const auto values = parse_latencies(r.output);
    if (values.empty()) throw Error(ErrorCode::kDeviceError, "command printed no latencies: " + command);
    samples.insert(samples.end(), values.begin(), values.end());
  }
  samples.resize(static_cast<std::size_t>(trials));
  return samples;
}

}  // namespace hwnas
