// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#include "logicbeam/external_scorer.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstring>
#include <mutex>

#include <json.hpp>

#include "logicbeam/error.hpp"

namespace logicbeam {

namespace {
constexpr double kRowTolerance = 1e-3;
}  // namespace

ExternalScorer::ExternalScorer(Vocab vocab, std::string command,
                               std::chrono::milliseconds timeout)
    : Scorer(std::move(vocab)), command_(std::move(command)), timeout_(timeout) {
  if (command_.empty())
    throw Error(ErrorKind::kValidation, "empty external scorer command");
  spawn();
}

ExternalScorer::~ExternalScorer() { close_pipes(); }

void ExternalScorer::spawn() {
  int to_child[2];
  int from_child[2];
  if (pipe(to_child) != 0 || pipe(from_child) != 0)
    throw Error(ErrorKind::kIo, "pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw Error(ErrorKind::kIo, "fork() failed");
  if (pid == 0) {
    setpgid(0, 0);  // own process group, so teardown reaps grandchildren too
    dup2(to_child[0], STDIN_FILENO);
    dup2(from_child[1], STDOUT_FILENO);
    close(to_child[0]);
    close(to_child[1]);
    close(from_child[0]);
    close(from_child[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(to_child[0]);
  close(from_child[1]);
  child_pid_ = pid;
  to_child_ = to_child[1];
  from_child_ = from_child[0];
}

void ExternalScorer::close_pipes() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (child_pid_ > 0) {
    kill(-child_pid_, SIGTERM);
    int status = 0;
    waitpid(child_pid_, &status, 0);
    child_pid_ = -1;
  }
}

std::string ExternalScorer::read_line() const {
  auto deadline = std::chrono::steady_clock::now() + timeout_;
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0)
      throw Error(ErrorKind::kTimeout, "external scorer timed out");
    struct pollfd pfd {};
    pfd.fd = from_child_;
    pfd.events = POLLIN;
    int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) throw Error(ErrorKind::kIo, "poll() failed");
    if (ready == 0) throw Error(ErrorKind::kTimeout, "external scorer timed out");
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n < 0) throw Error(ErrorKind::kIo, "read() from external scorer failed");
    if (n == 0)
      throw Error(ErrorKind::kProtocol, "external scorer closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

ScoreRows ExternalScorer::score_batch(std::span<const std::vector<TokenId>> prefixes) const {
  std::lock_guard<std::mutex> lock(request_mutex_);

  nlohmann::json request;
  request["prefixes"] = nlohmann::json::array();
  for (const auto& prefix : prefixes) request["prefixes"].push_back(prefix);
  std::string line = request.dump();
  line += '\n';
  std::size_t written = 0;
  while (written < line.size()) {
    ssize_t n = write(to_child_, line.data() + written, line.size() - written);
    if (n <= 0) throw Error(ErrorKind::kProtocol, "external scorer closed its input");
    written += static_cast<std::size_t>(n);
  }

  nlohmann::json response;
  try {
    response = nlohmann::json::parse(read_line());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kProtocol,
                std::string("malformed external scorer response: ") + e.what());
  }
  if (!response.is_object() || !response.contains("logprobs") ||
      !response["logprobs"].is_array())
    throw Error(ErrorKind::kProtocol, "external scorer response missing 'logprobs'");

  const auto& logprobs = response["logprobs"];
  if (logprobs.size() != prefixes.size())
    throw Error(ErrorKind::kProtocol, "external scorer returned wrong row count");

  ScoreRows rows;
  rows.reserve(prefixes.size());
  for (const auto& row_json : logprobs) {
    if (!row_json.is_array() || row_json.size() != vocab_.size())
      throw Error(ErrorKind::kProtocol, "external scorer returned wrong row width");
    ScoreRow row;
    row.reserve(vocab_.size());
    for (const auto& v : row_json) {
      if (!v.is_number())
        throw Error(ErrorKind::kProtocol, "non-numeric log-probability");
      row.push_back(v.get<double>());
    }
    double lse = log_sum_exp(row);
    if (!(std::abs(lse) <= kRowTolerance))
      throw Error(ErrorKind::kNormalization,
                  "external scorer row logsumexp = " + std::to_string(lse));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace logicbeam
