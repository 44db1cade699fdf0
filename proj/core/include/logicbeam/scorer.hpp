// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <span>
#include <vector>

#include "logicbeam/vocab.hpp"

namespace logicbeam {

using ScoreRow = std::vector<double>;
using ScoreRows = std::vector<ScoreRow>;

struct ScoreRequest {
  std::vector<std::vector<TokenId>> prefixes;
};

struct ScoreResponse {
  ScoreRows logprobs;  // one row of |V| natural-log probabilities per prefix
};

struct ScorerStats {
  std::uint64_t calls = 0;
  std::uint64_t rows = 0;
};

/// Batch next-token log-probability provider over a fixed vocabulary.
/// Implementations are read-only after construction; `score_next` is safe
/// under concurrent callers and counts calls/rows atomically.
class Scorer {
 public:
  virtual ~Scorer() = default;

  const Vocab& vocab() const { return vocab_; }
  std::size_t vocab_size() const { return vocab_.size(); }

  /// One full-vocabulary log-probability row per prefix. Each prefix is the
  /// encoded context followed by the generated tokens so far.
  ScoreRows score_next(std::span<const std::vector<TokenId>> prefixes) const {
    calls_.fetch_add(1, std::memory_order_relaxed);
    rows_.fetch_add(prefixes.size(), std::memory_order_relaxed);
    return score_batch(prefixes);
  }

  ScorerStats stats() const {
    return {calls_.load(std::memory_order_relaxed), rows_.load(std::memory_order_relaxed)};
  }
  void reset_stats() const {
    calls_.store(0, std::memory_order_relaxed);
    rows_.store(0, std::memory_order_relaxed);
  }

 protected:
  explicit Scorer(Vocab vocab) : vocab_(std::move(vocab)) {}
  // Copies and moves start with fresh counters.
  Scorer(const Scorer& other) : vocab_(other.vocab_) {}
  Scorer(Scorer&& other) noexcept : vocab_(std::move(other.vocab_)) {}
  Scorer& operator=(const Scorer&) = delete;
  Scorer& operator=(Scorer&&) = delete;

  virtual ScoreRows score_batch(std::span<const std::vector<TokenId>> prefixes) const = 0;

  Vocab vocab_;

 private:
  mutable std::atomic<std::uint64_t> calls_{0};
  mutable std::atomic<std::uint64_t> rows_{0};
};

/// Assigns every token probability 1/|V| regardless of context.
class UniformScorer : public Scorer {
 public:
  explicit UniformScorer(Vocab vocab) : Scorer(std::move(vocab)) {}

 protected:
  ScoreRows score_batch(std::span<const std::vector<TokenId>> prefixes) const override;
};

/// log(sum(exp(row))) with the usual max shift; -inf entries contribute 0.
double log_sum_exp(std::span<const double> row);

}  // namespace logicbeam
