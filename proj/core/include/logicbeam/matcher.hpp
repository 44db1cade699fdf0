// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "logicbeam/formula.hpp"
#include "logicbeam/vocab.hpp"

namespace logicbeam {

/// One phrase pattern with its prefix-function failure table
/// (failure[i] = length of the longest proper prefix of pattern[0..i] that
/// is also a suffix of it).
struct LiteralAutomaton {
  Phrase pattern;
  std::vector<std::int32_t> failure;
  Polarity polarity = Polarity::kPositive;
};

/// Computes the classic prefix function for a pattern.
std::vector<std::int32_t> prefix_function(const Phrase& pattern);

/// CNF compiled for incremental tracking: deduplicated literal automata plus
/// clause <-> literal cross references. Immutable once built.
class CompiledConstraints {
 public:
  static CompiledConstraints compile(const Cnf& cnf, const Vocab& vocab);
  CompiledConstraints() = default;

  const Cnf& cnf() const { return cnf_; }
  const std::vector<LiteralAutomaton>& literals() const { return literals_; }
  /// Literal indices per clause (post-deduplication).
  const std::vector<std::vector<std::int32_t>>& clauses() const { return clauses_; }
  /// Clause indices each literal participates in.
  const std::vector<std::vector<std::int32_t>>& literal_clauses() const {
    return literal_clauses_;
  }
  bool clause_is_tautology(std::size_t c) const { return tautology_[c]; }
  bool clause_has_positive(std::size_t c) const { return has_positive_[c]; }

  std::size_t num_clauses() const { return clauses_.size(); }
  std::size_t num_literals() const { return literals_.size(); }
  std::size_t vocab_size() const { return vocab_size_; }

 private:
  Cnf cnf_;
  std::vector<LiteralAutomaton> literals_;
  std::vector<std::vector<std::int32_t>> clauses_;
  std::vector<std::vector<std::int32_t>> literal_clauses_;
  std::vector<bool> tautology_;
  std::vector<bool> has_positive_;
  std::size_t vocab_size_ = 0;
};

enum class ClauseStatus : std::uint8_t {
  kIrreversiblySatisfied,  // a positive literal fired; absorbing
  kReversiblySatisfied,    // true only through live negative literals
  kUnsatisfied,            // no literal currently true, still satisfiable
  kUnsatisfiable,          // every literal is a violated negative; absorbing
};

/// Fixed-width bitmask over clause indices, usable as a binning key.
class ClauseBitset {
 public:
  ClauseBitset() = default;
  explicit ClauseBitset(std::size_t bits) : words_((bits + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & 1;
  }
  int popcount() const;

  bool operator==(const ClauseBitset&) const = default;
  bool operator<(const ClauseBitset& other) const { return words_ < other.words_; }
  std::size_t hash() const;

 private:
  std::vector<std::uint64_t> words_;
};

/// Per-hypothesis tracking snapshot. Values are immutable: `advance` returns
/// a fresh state, so hypotheses can branch by copying.
struct ConstraintState {
  static constexpr std::int32_t kUntracked = -1;

  /// Matched-prefix length per literal; kUntracked once every clause of the
  /// literal is irreversibly satisfied.
  std::vector<std::int32_t> pointers;
  /// Per-literal flag: a negative literal's phrase has occurred.
  std::vector<std::uint8_t> violated;
  std::vector<ClauseStatus> clause_statuses;
  /// Clauses currently satisfied (irreversibly or reversibly).
  ClauseBitset satisfied_set;
  std::int32_t satisfied_count = 0;
  bool any_unsatisfiable = false;
};

ConstraintState init_state(const CompiledConstraints& cc);

/// Pure transition: extends the tracked generation by one token. Pointers
/// follow the longest-prefix-that-is-a-suffix rule; a pointer reaching the
/// end of its pattern fires the literal and continues from the pattern's
/// longest proper border so overlapping occurrences keep matching.
ConstraintState advance(const ConstraintState& state, const CompiledConstraints& cc,
                        TokenId token);

bool is_unsatisfiable(const ConstraintState& state);

struct FinalStatus {
  std::vector<bool> clause_truth;  // reversibly satisfied counts as true
  std::int32_t satisfied_count = 0;
};

FinalStatus finalize(const ConstraintState& state);

/// Recomputes per-clause truth with plain substring scans over the full
/// sequence; the reference for the incremental machinery above.
std::vector<bool> naive_status(const Cnf& cnf, std::span<const TokenId> y);

}  // namespace logicbeam

template <>
struct std::hash<logicbeam::ClauseBitset> {
  std::size_t operator()(const logicbeam::ClauseBitset& b) const noexcept {
    return b.hash();
  }
};
