// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "logicbeam/matcher.hpp"
#include "logicbeam/scorer.hpp"

namespace logicbeam {

struct DecoderConfig {
  int beam_size = 4;  // k
  /// Score-rank cutoff over the pooled candidate list; unset = unlimited.
  std::optional<std::size_t> alpha;
  /// Number of top distinct satisfied-count values kept; unset = all.
  std::optional<int> beta;
  int max_len = 20;  // maximum generated tokens, N
  bool length_normalize = false;
  std::uint64_t seed = 0;
  bool match_in_prompt = false;
  /// Keep every finished hypothesis on the result (debugging aid).
  bool keep_finished = false;
};

struct SamplingParams {
  std::optional<int> top_k;
  std::optional<double> top_p;
};

struct DecodeStats {
  std::uint64_t scorer_calls = 0;
  std::uint64_t scored_rows = 0;
  std::uint64_t discarded_unsatisfiable = 0;
  /// Measured, not part of the deterministic contract; canonical
  /// serialization leaves it out.
  double wall_ms = 0.0;
};

struct FinishedHypothesis {
  std::vector<TokenId> tokens;  // includes the trailing EOS when generated
  double score = 0.0;
  std::int32_t satisfied_count = 0;
};

struct DecodeResult {
  std::vector<TokenId> tokens;
  double score = 0.0;
  std::vector<bool> clause_truth;
  std::int32_t satisfied_count = 0;
  /// False marks an instance where no hypothesis satisfied every clause.
  bool all_clauses_satisfied = true;
  DecodeStats stats;
  std::vector<FinishedHypothesis> finished;  // only when keep_finished
};

/// Deterministic JSON rendering used for replay and equality checks; wall
/// time is excluded.
std::string canonical_json(const DecodeResult& result);

/// Constrained beam search: per step the constraint state of every candidate
/// is advanced, candidates with unsatisfiable clauses are discarded, the
/// alpha/beta filters prune the pool, survivors are binned by their satisfied
/// clause set, and the beam is refilled round-robin by score across bins. The
/// final answer is the best-scoring finished hypothesis among those with the
/// most satisfied clauses.
DecodeResult neurologic_decode(const Scorer& scorer, std::span<const TokenId> context,
                               const CompiledConstraints& cc, const DecoderConfig& cfg);

/// Plain k-best-by-score beam search. `report` (optional) is only used to
/// evaluate the returned sequence's per-clause truth after the search.
DecodeResult beam_search(const Scorer& scorer, std::span<const TokenId> context,
                         const DecoderConfig& cfg,
                         const CompiledConstraints* report = nullptr);

/// Beam search with k = 1.
DecodeResult greedy_decode(const Scorer& scorer, std::span<const TokenId> context,
                           const DecoderConfig& cfg,
                           const CompiledConstraints* report = nullptr);

/// Seeded top-k / top-p ancestral sampling (exactly one mode must be set).
DecodeResult sample_decode(const Scorer& scorer, std::span<const TokenId> context,
                           const DecoderConfig& cfg, const SamplingParams& params,
                           const CompiledConstraints* report = nullptr);

/// Grid beam search over C+1 banks grouped by number of satisfied
/// constraints. Constraints must be a conjunction of positive single-literal
/// clauses.
DecodeResult gbs_decode(const Scorer& scorer, std::span<const TokenId> context,
                        const CompiledConstraints& cc, const DecoderConfig& cfg);

/// Constrained beam search over a 2^C-state machine (one state per subset of
/// completed constraints), k hypotheses per state. Same constraint class as
/// gbs_decode; C <= 16.
DecodeResult cbs_decode(const Scorer& scorer, std::span<const TokenId> context,
                        const CompiledConstraints& cc, const DecoderConfig& cfg);

struct OracleResult {
  std::vector<TokenId> tokens;  // best sequence at the maximum count
  double score = 0.0;           // optimal score at that count
  std::int32_t max_satisfied_count = 0;
  std::uint64_t sequences_scored = 0;
};

/// Exhaustive scoring of every generable sequence up to max_len (EOS ends a
/// sequence early; length-max_len sequences are closed as-is). Clause truth
/// comes from plain substring evaluation, independent of the incremental
/// matcher. Ties on (count, score) resolve to the lexicographically first
/// sequence. Guarded by |V|^(max_len+1) <= 2^22.
OracleResult brute_force_oracle(const Scorer& scorer, std::span<const TokenId> context,
                                const Cnf& cnf, int max_len);

}  // namespace logicbeam
