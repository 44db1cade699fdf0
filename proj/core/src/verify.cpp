// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#include "logicbeam/verify.hpp"

#include <algorithm>
#include <sstream>

#include "logicbeam/decode.hpp"
#include "logicbeam/error.hpp"
#include "logicbeam/matcher.hpp"
#include "logicbeam/ngram.hpp"

namespace logicbeam {

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

bool coin(std::mt19937_64& rng, double p) {
  return (static_cast<double>(rng() >> 11) * 0x1.0p-53) < p;
}

TokenId random_word(std::mt19937_64& rng, const Vocab& vocab) {
  return static_cast<TokenId>(
      uniform_int(rng, Vocab::kNumReserved, static_cast<int>(vocab.size()) - 1));
}

}  // namespace

Vocab RandomCase::small_vocab(int content_words) {
  Vocab v;
  for (int i = 0; i < content_words; ++i) v.add_word(std::string(1, static_cast<char>('a' + i)));
  return v;
}

Phrase RandomCase::phrase(std::mt19937_64& rng, const Vocab& vocab, int max_len) {
  Phrase p;
  int len = uniform_int(rng, 1, max_len);
  for (int i = 0; i < len; ++i) p.tokens.push_back(random_word(rng, vocab));
  return p;
}

Cnf RandomCase::cnf(std::mt19937_64& rng, const Vocab& vocab, int max_clauses,
                    int max_literals_per_clause, int max_phrase_len) {
  Cnf out;
  int clauses = uniform_int(rng, 1, max_clauses);
  for (int c = 0; c < clauses; ++c) {
    Clause clause;
    int lits = uniform_int(rng, 1, max_literals_per_clause);
    for (int l = 0; l < lits; ++l) {
      Literal lit;
      lit.polarity = coin(rng, 0.5) ? Polarity::kPositive : Polarity::kNegative;
      lit.phrase = phrase(rng, vocab, max_phrase_len);
      if (std::find(clause.literals.begin(), clause.literals.end(), lit) ==
          clause.literals.end())
        clause.literals.push_back(std::move(lit));
    }
    out.clauses.push_back(std::move(clause));
  }
  return out;
}

namespace {

Formula random_formula_impl(std::mt19937_64& rng, const Vocab& vocab, int& budget,
                            int depth, int max_depth, int max_phrase_len) {
  if (budget <= 1 || depth >= max_depth || coin(rng, 0.3)) {
    budget -= 1;
    Polarity pol = coin(rng, 0.5) ? Polarity::kPositive : Polarity::kNegative;
    return Formula::leaf(pol, RandomCase::phrase(rng, vocab, max_phrase_len));
  }
  int shape = uniform_int(rng, 0, 2);
  if (shape == 0)
    return Formula::negation(
        random_formula_impl(rng, vocab, budget, depth + 1, max_depth, max_phrase_len));
  int arity = uniform_int(rng, 2, std::min(3, std::max(2, budget)));
  std::vector<Formula> children;
  for (int i = 0; i < arity && budget > 0; ++i)
    children.push_back(
        random_formula_impl(rng, vocab, budget, depth + 1, max_depth, max_phrase_len));
  return shape == 1 ? Formula::conjunction(std::move(children))
                    : Formula::disjunction(std::move(children));
}

}  // namespace

Formula RandomCase::formula(std::mt19937_64& rng, const Vocab& vocab, int max_literals,
                            int max_depth, int max_phrase_len) {
  int budget = uniform_int(rng, 1, max_literals);
  return random_formula_impl(rng, vocab, budget, 0, max_depth, max_phrase_len);
}

std::vector<TokenId> RandomCase::stream(std::mt19937_64& rng, const Vocab& vocab,
                                        int max_len) {
  std::vector<TokenId> out;
  int len = uniform_int(rng, 0, max_len);
  for (int i = 0; i < len; ++i)
    out.push_back(static_cast<TokenId>(
        uniform_int(rng, 0, static_cast<int>(vocab.size()) - 1)));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Test hook for the negative control: runs the real transition, then wipes
// every matched prefix, so multi-token phrases can never complete.
ConstraintState corrupted_advance(const ConstraintState& state,
                                  const CompiledConstraints& cc, TokenId token) {
  ConstraintState s = advance(state, cc, token);
  for (auto& p : s.pointers)
    if (p != ConstraintState::kUntracked) p = 0;
  return s;
}

}  // namespace

VerifyCheck verify_matcher_equivalence(const VerifyOptions& options) {
  VerifyCheck check;
  check.name = "matcher-vs-naive";
  std::mt19937_64 rng(options.seed);
  Vocab vocab = RandomCase::small_vocab(3);  // |V| = 6
  int failures = 0;
  for (int trial = 0; trial < options.matcher_trials; ++trial) {
    Cnf cnf = RandomCase::cnf(rng, vocab, 4, 3, 3);
    std::vector<TokenId> stream = RandomCase::stream(rng, vocab, 20);
    CompiledConstraints cc = CompiledConstraints::compile(cnf, vocab);
    ConstraintState s = init_state(cc);
    for (TokenId t : stream)
      s = options.corrupt_matcher ? corrupted_advance(s, cc, t) : advance(s, cc, t);
    if (finalize(s).clause_truth != naive_status(cnf, stream)) ++failures;
  }
  check.pass = failures == 0;
  std::ostringstream detail;
  detail << failures << " of " << options.matcher_trials << " cases disagree";
  check.detail = detail.str();
  return check;
}

VerifyCheck verify_cnf_equivalence(const VerifyOptions& options) {
  VerifyCheck check;
  check.name = "formula-vs-cnf";
  std::mt19937_64 rng(options.seed + 1);
  Vocab vocab = RandomCase::small_vocab(3);
  int failures = 0;
  for (int trial = 0; trial < options.formula_trials; ++trial) {
    Formula f = RandomCase::formula(rng, vocab, 8, 4, 2);
    Cnf cnf = to_cnf(f);
    for (int s = 0; s < options.sequences_per_formula; ++s) {
      std::vector<TokenId> y = RandomCase::stream(rng, vocab, 12);
      if (evaluate(f, y) != evaluate(cnf, y)) ++failures;
    }
  }
  check.pass = failures == 0;
  std::ostringstream detail;
  detail << failures << " of " << options.formula_trials * options.sequences_per_formula
         << " evaluations disagree";
  check.detail = detail.str();
  return check;
}

VerifyCheck verify_decode_vs_oracle(const VerifyOptions& options) {
  VerifyCheck check;
  check.name = "neurologic-vs-oracle";
  std::mt19937_64 rng(options.seed + 2);
  Vocab vocab = RandomCase::small_vocab(3);  // |V| = 6

  int count_matches = 0;
  int score_matches = 0;
  int exceeded = 0;
  for (int trial = 0; trial < options.oracle_trials; ++trial) {
    std::vector<std::vector<TokenId>> corpus;
    for (int s = 0; s < 25; ++s) {
      std::vector<TokenId> sentence;
      int len = uniform_int(rng, 1, 6);
      for (int i = 0; i < len; ++i) sentence.push_back(random_word(rng, vocab));
      corpus.push_back(std::move(sentence));
    }
    NgramLm lm = NgramLm::train(vocab, corpus, {.order = 2, .add_k = 0.1, .lambda = {}});

    Cnf cnf = RandomCase::cnf(rng, vocab, 3, 2, 2);
    CompiledConstraints cc = CompiledConstraints::compile(cnf, vocab);

    DecoderConfig cfg;
    cfg.beam_size = 25;
    cfg.max_len = uniform_int(rng, 4, 6);
    DecodeResult got = neurologic_decode(lm, {}, cc, cfg);
    OracleResult want = brute_force_oracle(lm, {}, cnf, cfg.max_len);

    if (got.satisfied_count > want.max_satisfied_count) ++exceeded;
    if (got.satisfied_count == want.max_satisfied_count) {
      ++count_matches;
      if (got.score == want.score) ++score_matches;
    }
  }

  double count_rate = static_cast<double>(count_matches) / options.oracle_trials;
  double score_rate =
      count_matches == 0 ? 0.0 : static_cast<double>(score_matches) / count_matches;
  check.pass = exceeded == 0 && count_rate >= 0.95 && score_rate >= 0.80;
  std::ostringstream detail;
  detail << "count match " << count_matches << "/" << options.oracle_trials
         << ", optimal score " << score_matches << "/" << count_matches << ", exceeded "
         << exceeded;
  check.detail = detail.str();
  return check;
}

VerifyReport run_verification(const VerifyOptions& options) {
  if (options.matcher_trials <= 0 || options.formula_trials <= 0 ||
      options.sequences_per_formula <= 0 || options.oracle_trials <= 0)
    throw Error(ErrorKind::kValidation, "trial counts must be positive");
  VerifyReport report;
  report.checks.push_back(verify_matcher_equivalence(options));
  report.checks.push_back(verify_cnf_equivalence(options));
  report.checks.push_back(verify_decode_vs_oracle(options));
  report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                            [](const VerifyCheck& c) { return c.pass; });
  return report;
}

}  // namespace logicbeam
