// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "logicbeam/formula.hpp"
#include "logicbeam/vocab.hpp"

namespace logicbeam {

/// Seeded generators for randomized checks. All draw from a vocabulary of
/// `content_words` regular words on top of the reserved ids.
struct RandomCase {
  static Vocab small_vocab(int content_words);

  static Phrase phrase(std::mt19937_64& rng, const Vocab& vocab, int max_len);
  static Cnf cnf(std::mt19937_64& rng, const Vocab& vocab, int max_clauses,
                 int max_literals_per_clause, int max_phrase_len);
  static Formula formula(std::mt19937_64& rng, const Vocab& vocab, int max_literals,
                         int max_depth, int max_phrase_len);
  /// Token stream over the full id range [0, |V|).
  static std::vector<TokenId> stream(std::mt19937_64& rng, const Vocab& vocab,
                                     int max_len);
};

struct VerifyOptions {
  int matcher_trials = 1000;
  int formula_trials = 300;
  int sequences_per_formula = 50;
  int oracle_trials = 50;
  std::uint64_t seed = 20260801;
  /// Test hook: swaps in a deliberately broken pointer update so the
  /// equivalence suite can demonstrate a failure.
  bool corrupt_matcher = false;
};

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  bool pass = false;
  std::vector<VerifyCheck> checks;
};

/// Incremental clause statuses after a full stream vs. plain substring
/// recomputation, over random (CNF, stream) cases.
VerifyCheck verify_matcher_equivalence(const VerifyOptions& options);
/// evaluate(formula) vs. evaluate(to_cnf(formula)) on random sequences.
VerifyCheck verify_cnf_equivalence(const VerifyOptions& options);
/// Constrained decoding vs. the brute-force optimum on tiny seeded
/// instances: counts never exceed the optimum, match it in >= 95% of cases,
/// and hit the optimal score in >= 80% of the matching cases.
VerifyCheck verify_decode_vs_oracle(const VerifyOptions& options);

/// Runs all of the randomized self-checks above.
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace logicbeam
