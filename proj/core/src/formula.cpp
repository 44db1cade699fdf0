// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#include "logicbeam/formula.hpp"

#include <algorithm>
#include <cctype>
#include <utility>

#include "logicbeam/error.hpp"

namespace logicbeam {

Formula Formula::leaf(Polarity polarity, Phrase phrase) {
  if (phrase.tokens.empty()) throw Error(ErrorKind::kValidation, "empty phrase");
  Formula f;
  f.kind_ = Kind::kLeaf;
  f.literal_ = Literal{polarity, std::move(phrase)};
  return f;
}

Formula Formula::negation(Formula child) {
  Formula f;
  f.kind_ = Kind::kNot;
  f.children_.push_back(std::move(child));
  return f;
}

Formula Formula::conjunction(std::vector<Formula> children) {
  if (children.empty()) throw Error(ErrorKind::kValidation, "conjunction needs children");
  if (children.size() == 1) return std::move(children.front());
  Formula f;
  f.kind_ = Kind::kAnd;
  f.children_ = std::move(children);
  return f;
}

Formula Formula::disjunction(std::vector<Formula> children) {
  if (children.empty()) throw Error(ErrorKind::kValidation, "disjunction needs children");
  if (children.size() == 1) return std::move(children.front());
  Formula f;
  f.kind_ = Kind::kOr;
  f.children_ = std::move(children);
  return f;
}

const Literal& Formula::literal() const {
  if (kind_ != Kind::kLeaf) throw Error(ErrorKind::kValidation, "not a leaf");
  return literal_;
}

bool Formula::operator==(const Formula& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::kLeaf) return literal_ == other.literal_;
  return children_ == other.children_;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, Vocab* open_vocab, const Vocab& vocab)
      : text_(text), open_vocab_(open_vocab), vocab_(vocab) {}

  Formula parse() {
    Formula f = parse_or();
    skip_ws();
    if (pos_ != text_.size())
      throw Error(ErrorKind::kSyntax, "unexpected trailing input", pos_);
    return f;
  }

 private:
  Formula parse_or() {
    std::vector<Formula> parts;
    parts.push_back(parse_and());
    while (peek() == '|') {
      ++pos_;
      parts.push_back(parse_and());
    }
    return Formula::disjunction(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts;
    parts.push_back(parse_unary());
    while (peek() == '&') {
      ++pos_;
      parts.push_back(parse_unary());
    }
    return Formula::conjunction(std::move(parts));
  }

  Formula parse_unary() {
    char c = peek();
    if (c == '!') {
      ++pos_;
      return Formula::negation(parse_unary());
    }
    if (c == '(') {
      ++pos_;
      Formula inner = parse_or();
      if (peek() != ')') throw Error(ErrorKind::kSyntax, "expected ')'", pos_);
      ++pos_;
      return inner;
    }
    if (c == '"') return parse_phrase();
    throw Error(ErrorKind::kSyntax, "expected '!', '(' or a quoted phrase", pos_);
  }

  Formula parse_phrase() {
    std::size_t open = pos_;
    ++pos_;  // opening quote
    std::size_t end = text_.find('"', pos_);
    if (end == std::string_view::npos)
      throw Error(ErrorKind::kSyntax, "unterminated phrase", open);
    std::string_view body = text_.substr(pos_, end - pos_);
    Phrase phrase;
    std::size_t i = 0;
    while (i < body.size()) {
      while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
      std::size_t start = i;
      while (i < body.size() && !std::isspace(static_cast<unsigned char>(body[i]))) ++i;
      if (i > start) {
        std::string_view word = body.substr(start, i - start);
        if (open_vocab_ != nullptr) {
          phrase.tokens.push_back(open_vocab_->add_word(word));
        } else {
          auto id = vocab_.find(word);
          if (!id)
            throw Error(ErrorKind::kUnknownWord,
                        "unknown word '" + std::string(word) + "'", pos_ + start);
          phrase.tokens.push_back(*id);
        }
      }
    }
    if (phrase.tokens.empty())
      throw Error(ErrorKind::kSyntax, "empty phrase", open);
    pos_ = end + 1;
    return Formula::leaf(Polarity::kPositive, std::move(phrase));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  // Next significant character, or '\0' at end of input.
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Vocab* open_vocab_;
  const Vocab& vocab_;
};

}  // namespace

Formula parse_formula(std::string_view text, const Vocab& vocab) {
  return Parser(text, nullptr, vocab).parse();
}

Formula parse_formula_open(std::string_view text, Vocab& vocab) {
  return Parser(text, &vocab, vocab).parse();
}

// ---------------------------------------------------------------------------
// Printer

namespace {

void print_node(const Formula& f, const Vocab& vocab, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::kLeaf: {
      const Literal& lit = f.literal();
      if (lit.polarity == Polarity::kNegative) out += '!';
      out += '"';
      for (std::size_t i = 0; i < lit.phrase.tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += vocab.word(lit.phrase.tokens[i]);
      }
      out += '"';
      return;
    }
    case Formula::Kind::kNot: {
      const Formula& child = f.children().front();
      out += '!';
      if (child.kind() == Formula::Kind::kLeaf || child.kind() == Formula::Kind::kNot) {
        print_node(child, vocab, out);
      } else {
        out += '(';
        print_node(child, vocab, out);
        out += ')';
      }
      return;
    }
    case Formula::Kind::kAnd:
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i > 0) out += " & ";
        const Formula& child = f.children()[i];
        if (child.kind() == Formula::Kind::kOr || child.kind() == Formula::Kind::kAnd) {
          out += '(';
          print_node(child, vocab, out);
          out += ')';
        } else {
          print_node(child, vocab, out);
        }
      }
      return;
    case Formula::Kind::kOr:
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i > 0) out += " | ";
        const Formula& child = f.children()[i];
        if (child.kind() == Formula::Kind::kOr) {
          out += '(';
          print_node(child, vocab, out);
          out += ')';
        } else {
          print_node(child, vocab, out);
        }
      }
      return;
  }
}

}  // namespace

std::string to_dsl(const Formula& f, const Vocab& vocab) {
  std::string out;
  print_node(f, vocab, out);
  return out;
}

std::string to_dsl(const Cnf& cnf, const Vocab& vocab) {
  std::string out;
  for (std::size_t c = 0; c < cnf.clauses.size(); ++c) {
    if (c > 0) out += " & ";
    const Clause& clause = cnf.clauses[c];
    bool parens = cnf.clauses.size() > 1 && clause.literals.size() > 1;
    if (parens) out += '(';
    for (std::size_t i = 0; i < clause.literals.size(); ++i) {
      if (i > 0) out += " | ";
      print_node(Formula::leaf(clause.literals[i].polarity, clause.literals[i].phrase),
                 vocab, out);
    }
    if (parens) out += ')';
  }
  return out;
}

// ---------------------------------------------------------------------------
// CNF conversion

namespace {

void append_unique(Clause& clause, const Literal& lit) {
  if (std::find(clause.literals.begin(), clause.literals.end(), lit) == clause.literals.end())
    clause.literals.push_back(lit);
}

// Negation-normal-form walk followed by OR-over-AND distribution; the result
// accumulates bottom-up as clause lists.
std::vector<Clause> to_clauses(const Formula& f, bool negated, std::size_t max_clauses) {
  switch (f.kind()) {
    case Formula::Kind::kLeaf: {
      Literal lit = f.literal();
      if (negated)
        lit.polarity = lit.polarity == Polarity::kPositive ? Polarity::kNegative
                                                           : Polarity::kPositive;
      return {Clause{{lit}}};
    }
    case Formula::Kind::kNot:
      return to_clauses(f.children().front(), !negated, max_clauses);
    case Formula::Kind::kAnd:
    case Formula::Kind::kOr: {
      bool conjunctive = (f.kind() == Formula::Kind::kAnd) != negated;
      std::vector<std::vector<Clause>> parts;
      parts.reserve(f.children().size());
      for (const Formula& child : f.children())
        parts.push_back(to_clauses(child, negated, max_clauses));
      if (conjunctive) {
        std::vector<Clause> all;
        for (auto& p : parts) {
          all.insert(all.end(), p.begin(), p.end());
          if (all.size() > max_clauses)
            throw Error(ErrorKind::kSizeGuard, "CNF clause limit exceeded");
        }
        return all;
      }
      // Disjunction: distribute by forming the cross product of clauses.
      std::vector<Clause> acc = std::move(parts.front());
      for (std::size_t i = 1; i < parts.size(); ++i) {
        std::vector<Clause> next;
        if (acc.size() * parts[i].size() > max_clauses)
          throw Error(ErrorKind::kSizeGuard, "CNF clause limit exceeded");
        for (const Clause& a : acc) {
          for (const Clause& b : parts[i]) {
            Clause merged = a;
            for (const Literal& lit : b.literals) append_unique(merged, lit);
            next.push_back(std::move(merged));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
  }
  throw Error(ErrorKind::kValidation, "unreachable formula kind");
}

}  // namespace

Cnf to_cnf(const Formula& f, std::size_t max_clauses) {
  Cnf cnf;
  cnf.clauses = to_clauses(f, /*negated=*/false, max_clauses);
  for (Clause& clause : cnf.clauses) {
    Clause dedup;
    for (const Literal& lit : clause.literals) append_unique(dedup, lit);
    clause = std::move(dedup);
  }
  if (cnf.clauses.size() > max_clauses)
    throw Error(ErrorKind::kSizeGuard, "CNF clause limit exceeded");
  return cnf;
}

// ---------------------------------------------------------------------------
// Evaluation

bool contains_phrase(std::span<const TokenId> y, const Phrase& phrase) {
  const std::size_t m = phrase.tokens.size();
  if (m == 0 || m > y.size()) return false;
  for (std::size_t i = 0; i + m <= y.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < m; ++j) {
      if (y[i + j] != phrase.tokens[j]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

namespace {

bool literal_holds(const Literal& lit, std::span<const TokenId> y) {
  bool present = contains_phrase(y, lit.phrase);
  return lit.polarity == Polarity::kPositive ? present : !present;
}

}  // namespace

bool evaluate(const Formula& f, std::span<const TokenId> y) {
  switch (f.kind()) {
    case Formula::Kind::kLeaf:
      return literal_holds(f.literal(), y);
    case Formula::Kind::kNot:
      return !evaluate(f.children().front(), y);
    case Formula::Kind::kAnd:
      return std::all_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return evaluate(c, y); });
    case Formula::Kind::kOr:
      return std::any_of(f.children().begin(), f.children().end(),
                         [&](const Formula& c) { return evaluate(c, y); });
  }
  return false;
}

std::vector<bool> clause_values(const Cnf& cnf, std::span<const TokenId> y) {
  std::vector<bool> values;
  values.reserve(cnf.clauses.size());
  for (const Clause& clause : cnf.clauses) {
    bool v = std::any_of(clause.literals.begin(), clause.literals.end(),
                         [&](const Literal& lit) { return literal_holds(lit, y); });
    values.push_back(v);
  }
  return values;
}

bool evaluate(const Cnf& cnf, std::span<const TokenId> y) {
  auto values = clause_values(cnf, y);
  return std::all_of(values.begin(), values.end(), [](bool v) { return v; });
}

// ---------------------------------------------------------------------------
// Task constructions

namespace {

void append_variant_clause(Cnf& cnf, const std::vector<Phrase>& variants) {
  if (variants.empty())
    throw Error(ErrorKind::kValidation, "empty variant set");
  Clause clause;
  for (const Phrase& p : variants) append_unique(clause, Literal{Polarity::kPositive, p});
  cnf.clauses.push_back(std::move(clause));
}

}  // namespace

Cnf build_cover_all(const std::vector<std::vector<Phrase>>& variant_sets) {
  Cnf cnf;
  for (const auto& set : variant_sets) append_variant_clause(cnf, set);
  return cnf;
}

Cnf build_include_exclude(const std::vector<std::vector<Phrase>>& include,
                          const std::vector<Phrase>& exclude) {
  for (const Phrase& e : exclude) {
    for (const auto& set : include) {
      if (std::find(set.begin(), set.end(), e) != set.end())
        throw Error(ErrorKind::kValidation, "phrase appears in both include and exclude");
    }
  }
  Cnf cnf;
  for (const auto& set : include) append_variant_clause(cnf, set);
  for (const Phrase& e : exclude) {
    if (e.tokens.empty()) throw Error(ErrorKind::kValidation, "empty phrase");
    cnf.clauses.push_back(Clause{{Literal{Polarity::kNegative, e}}});
  }
  return cnf;
}

}  // namespace logicbeam
