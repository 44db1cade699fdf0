// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#include "logicbeam/matcher.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <utility>

#include "logicbeam/error.hpp"

namespace logicbeam {

std::vector<std::int32_t> prefix_function(const Phrase& pattern) {
  const std::size_t m = pattern.tokens.size();
  std::vector<std::int32_t> pi(m, 0);
  for (std::size_t i = 1; i < m; ++i) {
    std::int32_t p = pi[i - 1];
    while (p > 0 && pattern.tokens[i] != pattern.tokens[static_cast<std::size_t>(p)])
      p = pi[static_cast<std::size_t>(p) - 1];
    if (pattern.tokens[i] == pattern.tokens[static_cast<std::size_t>(p)]) ++p;
    pi[i] = p;
  }
  return pi;
}

CompiledConstraints CompiledConstraints::compile(const Cnf& cnf, const Vocab& vocab) {
  CompiledConstraints cc;
  cc.cnf_ = cnf;
  cc.vocab_size_ = vocab.size();

  // Deduplicate by (polarity, pattern); ordering is clause order, then
  // literal order within the clause.
  std::map<std::pair<int, std::vector<TokenId>>, std::int32_t> seen;
  for (const Clause& clause : cnf.clauses) {
    if (clause.literals.empty())
      throw Error(ErrorKind::kValidation, "empty clause");
    std::vector<std::int32_t> refs;
    const std::int32_t clause_index = static_cast<std::int32_t>(cc.clauses_.size());
    for (const Literal& lit : clause.literals) {
      if (lit.phrase.tokens.empty())
        throw Error(ErrorKind::kValidation, "empty phrase");
      for (TokenId t : lit.phrase.tokens) {
        if (t < 0 || static_cast<std::size_t>(t) >= vocab.size())
          throw Error(ErrorKind::kValidation,
                      "phrase token id out of vocabulary: " + std::to_string(t));
      }
      auto key = std::make_pair(static_cast<int>(lit.polarity), lit.phrase.tokens);
      auto it = seen.find(key);
      std::int32_t index;
      if (it == seen.end()) {
        index = static_cast<std::int32_t>(cc.literals_.size());
        cc.literals_.push_back(
            LiteralAutomaton{lit.phrase, prefix_function(lit.phrase), lit.polarity});
        cc.literal_clauses_.emplace_back();
        seen.emplace(std::move(key), index);
      } else {
        index = it->second;
      }
      if (std::find(refs.begin(), refs.end(), index) == refs.end()) {
        refs.push_back(index);
        cc.literal_clauses_[static_cast<std::size_t>(index)].push_back(clause_index);
      }
    }
    bool tautology = false;
    bool has_positive = false;
    for (std::int32_t a : refs) {
      const LiteralAutomaton& la = cc.literals_[static_cast<std::size_t>(a)];
      if (la.polarity == Polarity::kPositive) has_positive = true;
      for (std::int32_t b : refs) {
        const LiteralAutomaton& lb = cc.literals_[static_cast<std::size_t>(b)];
        if (la.polarity == Polarity::kPositive && lb.polarity == Polarity::kNegative &&
            la.pattern == lb.pattern)
          tautology = true;
      }
    }
    cc.clauses_.push_back(std::move(refs));
    cc.tautology_.push_back(tautology);
    cc.has_positive_.push_back(has_positive);
  }
  return cc;
}

int ClauseBitset::popcount() const {
  int n = 0;
  for (std::uint64_t w : words_) n += std::popcount(w);
  return n;
}

std::size_t ClauseBitset::hash() const {
  std::size_t h = words_.size();
  for (std::uint64_t w : words_) h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

namespace {

// Literals stay tracked while they belong to at least one clause that is not
// irreversibly satisfied.
bool literal_tracked(const CompiledConstraints& cc, const ConstraintState& s,
                     std::int32_t literal) {
  for (std::int32_t c : cc.literal_clauses()[static_cast<std::size_t>(literal)]) {
    if (s.clause_statuses[static_cast<std::size_t>(c)] !=
        ClauseStatus::kIrreversiblySatisfied)
      return true;
  }
  return false;
}

ClauseStatus derive_status(const CompiledConstraints& cc, const ConstraintState& s,
                           std::size_t clause) {
  bool all_violated_negative = true;
  bool any_live_negative = false;
  for (std::int32_t lit : cc.clauses()[clause]) {
    const auto& automaton = cc.literals()[static_cast<std::size_t>(lit)];
    if (automaton.polarity == Polarity::kNegative) {
      if (s.violated[static_cast<std::size_t>(lit)])
        continue;
      any_live_negative = true;
      all_violated_negative = false;
    } else {
      all_violated_negative = false;
    }
  }
  if (all_violated_negative) return ClauseStatus::kUnsatisfiable;
  if (any_live_negative) return ClauseStatus::kReversiblySatisfied;
  return ClauseStatus::kUnsatisfied;
}

void refresh_summary(ConstraintState& s) {
  const std::size_t n = s.clause_statuses.size();
  s.satisfied_set = ClauseBitset(n);
  s.any_unsatisfiable = false;
  for (std::size_t c = 0; c < n; ++c) {
    switch (s.clause_statuses[c]) {
      case ClauseStatus::kIrreversiblySatisfied:
      case ClauseStatus::kReversiblySatisfied:
        s.satisfied_set.set(c);
        break;
      case ClauseStatus::kUnsatisfiable:
        s.any_unsatisfiable = true;
        break;
      case ClauseStatus::kUnsatisfied:
        break;
    }
  }
  s.satisfied_count = s.satisfied_set.popcount();
}

void drop_untracked_pointers(const CompiledConstraints& cc, ConstraintState& s) {
  for (std::size_t lit = 0; lit < s.pointers.size(); ++lit) {
    if (s.pointers[lit] != ConstraintState::kUntracked &&
        !literal_tracked(cc, s, static_cast<std::int32_t>(lit)))
      s.pointers[lit] = ConstraintState::kUntracked;
  }
}

}  // namespace

ConstraintState init_state(const CompiledConstraints& cc) {
  ConstraintState s;
  s.pointers.assign(cc.num_literals(), 0);
  s.violated.assign(cc.num_literals(), 0);
  s.clause_statuses.resize(cc.num_clauses());
  for (std::size_t c = 0; c < cc.num_clauses(); ++c) {
    if (cc.clause_is_tautology(c)) {
      s.clause_statuses[c] = ClauseStatus::kIrreversiblySatisfied;
    } else {
      bool any_negative = false;
      for (std::int32_t lit : cc.clauses()[c])
        if (cc.literals()[static_cast<std::size_t>(lit)].polarity == Polarity::kNegative)
          any_negative = true;
      s.clause_statuses[c] =
          any_negative ? ClauseStatus::kReversiblySatisfied : ClauseStatus::kUnsatisfied;
    }
  }
  drop_untracked_pointers(cc, s);
  refresh_summary(s);
  return s;
}

ConstraintState advance(const ConstraintState& state, const CompiledConstraints& cc,
                        TokenId token) {
  ConstraintState s = state;
  std::vector<std::int32_t> fired_positive;
  std::vector<std::int32_t> fired_negative;

  for (std::size_t lit = 0; lit < s.pointers.size(); ++lit) {
    std::int32_t p = s.pointers[lit];
    if (p == ConstraintState::kUntracked) continue;
    const LiteralAutomaton& a = cc.literals()[lit];
    const auto& pat = a.pattern.tokens;
    while (p > 0 && pat[static_cast<std::size_t>(p)] != token)
      p = a.failure[static_cast<std::size_t>(p) - 1];
    if (pat[static_cast<std::size_t>(p)] == token) ++p;
    if (p == static_cast<std::int32_t>(pat.size())) {
      if (a.polarity == Polarity::kPositive)
        fired_positive.push_back(static_cast<std::int32_t>(lit));
      else
        fired_negative.push_back(static_cast<std::int32_t>(lit));
      p = a.failure.back();  // keep matching overlapping occurrences
    }
    s.pointers[lit] = p;
  }

  bool statuses_changed = false;
  for (std::int32_t lit : fired_positive) {
    for (std::int32_t c : cc.literal_clauses()[static_cast<std::size_t>(lit)]) {
      auto& status = s.clause_statuses[static_cast<std::size_t>(c)];
      if (status != ClauseStatus::kIrreversiblySatisfied &&
          status != ClauseStatus::kUnsatisfiable) {
        status = ClauseStatus::kIrreversiblySatisfied;
        statuses_changed = true;
      }
    }
  }
  for (std::int32_t lit : fired_negative) {
    if (s.violated[static_cast<std::size_t>(lit)]) continue;
    s.violated[static_cast<std::size_t>(lit)] = 1;
    for (std::int32_t c : cc.literal_clauses()[static_cast<std::size_t>(lit)]) {
      auto& status = s.clause_statuses[static_cast<std::size_t>(c)];
      if (status == ClauseStatus::kIrreversiblySatisfied ||
          status == ClauseStatus::kUnsatisfiable)
        continue;
      status = derive_status(cc, s, static_cast<std::size_t>(c));
      statuses_changed = true;
    }
  }

  if (statuses_changed) {
    drop_untracked_pointers(cc, s);
    refresh_summary(s);
  }
  return s;
}

bool is_unsatisfiable(const ConstraintState& state) { return state.any_unsatisfiable; }

FinalStatus finalize(const ConstraintState& state) {
  FinalStatus out;
  out.clause_truth.reserve(state.clause_statuses.size());
  for (ClauseStatus st : state.clause_statuses)
    out.clause_truth.push_back(st == ClauseStatus::kIrreversiblySatisfied ||
                               st == ClauseStatus::kReversiblySatisfied);
  out.satisfied_count = state.satisfied_count;
  return out;
}

std::vector<bool> naive_status(const Cnf& cnf, std::span<const TokenId> y) {
  return clause_values(cnf, y);
}

}  // namespace logicbeam
