// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <mutex>
#include <string>

#include "logicbeam/scorer.hpp"

namespace logicbeam {

/// Scores through a child process speaking line-delimited JSON on its
/// standard streams: one {"prefixes": [[int,...],...]} request line yields
/// one {"logprobs": [[float x |V|],...]} response line, order-preserving.
/// Rows are validated for width and normalization (logsumexp within 1e-3).
/// Requests are serialized per connection.
class ExternalScorer : public Scorer {
 public:
  ExternalScorer(Vocab vocab, std::string command,
                 std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer&) = delete;
  ExternalScorer& operator=(const ExternalScorer&) = delete;

 protected:
  ScoreRows score_batch(std::span<const std::vector<TokenId>> prefixes) const override;

 private:
  void spawn();
  void close_pipes();
  std::string read_line() const;

  std::string command_;
  std::chrono::milliseconds timeout_;
  int child_pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  mutable std::mutex request_mutex_;
  mutable std::string buffer_;
};

}  // namespace logicbeam
