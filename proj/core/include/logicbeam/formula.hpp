// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logicbeam/vocab.hpp"

namespace logicbeam {

/// A token-level word or multi-word phrase. Always non-empty.
struct Phrase {
  std::vector<TokenId> tokens;

  bool operator==(const Phrase&) const = default;
};

enum class Polarity : std::uint8_t { kPositive, kNegative };

/// A positive literal asserts the phrase occurs as a contiguous subsequence
/// of the output; a negative literal asserts it does not.
struct Literal {
  Polarity polarity = Polarity::kPositive;
  Phrase phrase;

  bool operator==(const Literal&) const = default;
};

/// Disjunction of literals; satisfied when any literal holds.
struct Clause {
  std::vector<Literal> literals;

  bool operator==(const Clause&) const = default;
};

/// Conjunction of clauses. Zero clauses means unconstrained.
struct Cnf {
  std::vector<Clause> clauses;

  std::size_t num_clauses() const { return clauses.size(); }
  bool operator==(const Cnf&) const = default;
};

/// Predicate-logic constraint tree over phrase literals.
class Formula {
 public:
  enum class Kind : std::uint8_t { kLeaf, kNot, kAnd, kOr };

  static Formula leaf(Polarity polarity, Phrase phrase);
  static Formula negation(Formula child);
  static Formula conjunction(std::vector<Formula> children);  // >= 1 children
  static Formula disjunction(std::vector<Formula> children);  // >= 1 children

  Kind kind() const { return kind_; }
  const Literal& literal() const;                  // kLeaf only
  const std::vector<Formula>& children() const { return children_; }

  bool operator==(const Formula& other) const;

 private:
  Formula() = default;

  Kind kind_ = Kind::kLeaf;
  Literal literal_;
  std::vector<Formula> children_;
};

/// Parses the constraint DSL. Grammar (precedence NOT > AND > OR):
///   formula := or ; or := and ("|" and)* ; and := unary ("&" unary)* ;
///   unary := "!" unary | "(" formula ")" | phrase ;
///   phrase := '"' word (space word)* '"'
/// Throws ErrorKind::kSyntax (with byte offset) on malformed input and
/// ErrorKind::kUnknownWord when a phrase word is not in the vocabulary.
Formula parse_formula(std::string_view text, const Vocab& vocab);

/// Same grammar, but unknown phrase words are added to `vocab`.
Formula parse_formula_open(std::string_view text, Vocab& vocab);

/// Canonical DSL rendering; parse(to_dsl(f)) is structurally stable.
std::string to_dsl(const Formula& f, const Vocab& vocab);
std::string to_dsl(const Cnf& cnf, const Vocab& vocab);

/// Converts to conjunctive normal form: negations pushed onto literals by
/// De Morgan's laws, then disjunctions distributed over conjunctions.
/// Duplicate literals inside a clause are dropped; tautological clauses are
/// kept as-is. Throws ErrorKind::kSizeGuard when the clause count would
/// exceed `max_clauses`.
Cnf to_cnf(const Formula& f, std::size_t max_clauses = 4096);

/// True iff `phrase` occurs as a contiguous subsequence of `y`.
bool contains_phrase(std::span<const TokenId> y, const Phrase& phrase);

bool evaluate(const Formula& f, std::span<const TokenId> y);
bool evaluate(const Cnf& cnf, std::span<const TokenId> y);
std::vector<bool> clause_values(const Cnf& cnf, std::span<const TokenId> y);

/// One clause per variant set: the disjunction of positive literals over the
/// set's phrases. Throws ErrorKind::kValidation on an empty set.
Cnf build_cover_all(const std::vector<std::vector<Phrase>>& variant_sets);

/// Cover-all clauses for `include` plus one singleton negative clause per
/// `exclude` phrase. Throws ErrorKind::kValidation when a phrase appears on
/// both sides.
Cnf build_include_exclude(const std::vector<std::vector<Phrase>>& include,
                          const std::vector<Phrase>& exclude);

}  // namespace logicbeam
