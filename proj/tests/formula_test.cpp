// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
#include "logicbeam/formula.hpp"

#include <random>

#include <doctest.h>

#include "logicbeam/error.hpp"
#include "logicbeam/verify.hpp"
#include "testutil.hpp"

using namespace logicbeam;

namespace {

Vocab abc() { return testutil::make_vocab({"a", "b", "c"}); }

}  // namespace

TEST_CASE("parse: single literal") {
  Vocab v = abc();
  Formula f = parse_formula("\"a\"", v);
  REQUIRE(f.kind() == Formula::Kind::kLeaf);
  CHECK(f.literal().polarity == Polarity::kPositive);
  CHECK(f.literal().phrase == testutil::phrase(v, "a"));
}

TEST_CASE("parse: negation mirrors input structure") {
  Vocab v = abc();
  Formula f = parse_formula("!(\"a\" & \"b\")", v);
  REQUIRE(f.kind() == Formula::Kind::kNot);
  const Formula& inner = f.children().front();
  REQUIRE(inner.kind() == Formula::Kind::kAnd);
  REQUIRE(inner.children().size() == 2);
  CHECK(inner.children()[0].literal() == testutil::pos(v, "a"));
  CHECK(inner.children()[1].literal() == testutil::pos(v, "b"));
}

TEST_CASE("parse: multi-token phrase literal") {
  Vocab v = testutil::make_vocab({"red", "onion", "shallot"});
  Formula f = parse_formula("\"red onion\" | \"shallot\"", v);
  REQUIRE(f.kind() == Formula::Kind::kOr);
  CHECK(f.children()[0].literal().phrase == testutil::phrase(v, "red onion"));
  CHECK(f.children()[1].literal().phrase == testutil::phrase(v, "shallot"));
}

TEST_CASE("parse: precedence NOT > AND > OR") {
  Vocab v = abc();
  Formula f = parse_formula("\"a\" & \"b\" | \"c\"", v);
  REQUIRE(f.kind() == Formula::Kind::kOr);
  CHECK(f.children()[0].kind() == Formula::Kind::kAnd);

  Formula g = parse_formula("!\"a\" & \"b\"", v);
  REQUIRE(g.kind() == Formula::Kind::kAnd);
  CHECK(g.children()[0].kind() == Formula::Kind::kNot);
}

TEST_CASE("parse: errors carry kind and offset") {
  Vocab v = abc();
  CHECK_THROWS_WITH_AS(parse_formula("\"a\" &", v), doctest::Contains("expected"), Error);
  try {
    parse_formula("\"a\" & \"zebra\"", v);
    FAIL("expected unknown-word error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUnknownWord);
    REQUIRE(e.offset().has_value());
    CHECK(*e.offset() > 0);
  }
  try {
    parse_formula("(\"a\"", v);
    FAIL("expected syntax error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSyntax);
  }
  CHECK_THROWS_AS(parse_formula("\"\"", v), Error);
  CHECK_THROWS_AS(parse_formula("\"a\" \"b\"", v), Error);  // trailing input
  CHECK_THROWS_AS(parse_formula("\"a", v), Error);          // unterminated
}

TEST_CASE("parse_formula_open adds words") {
  Vocab v;
  Formula f = parse_formula_open("\"left\" & !\"right\"", v);
  CHECK(v.find("left").has_value());
  CHECK(v.find("right").has_value());
  CHECK(f.kind() == Formula::Kind::kAnd);
}

TEST_CASE("to_cnf: De Morgan") {
  Vocab v = abc();
  Cnf cnf = to_cnf(parse_formula("!(\"a\" & \"b\")", v));
  REQUIRE(cnf.clauses.size() == 1);
  REQUIRE(cnf.clauses[0].literals.size() == 2);
  CHECK(cnf.clauses[0].literals[0] == testutil::neg(v, "a"));
  CHECK(cnf.clauses[0].literals[1] == testutil::neg(v, "b"));
}

TEST_CASE("to_cnf: distribution") {
  Vocab v = abc();
  Cnf cnf = to_cnf(parse_formula("\"a\" | (\"b\" & \"c\")", v));
  REQUIRE(cnf.clauses.size() == 2);
  CHECK(cnf.clauses[0].literals ==
        std::vector<Literal>{testutil::pos(v, "a"), testutil::pos(v, "b")});
  CHECK(cnf.clauses[1].literals ==
        std::vector<Literal>{testutil::pos(v, "a"), testutil::pos(v, "c")});
}

TEST_CASE("to_cnf: already CNF") {
  Vocab v = abc();
  Cnf cnf = to_cnf(parse_formula("\"a\" & (\"b\" | !\"c\")", v));
  REQUIRE(cnf.clauses.size() == 2);
  CHECK(cnf.clauses[0].literals == std::vector<Literal>{testutil::pos(v, "a")});
  CHECK(cnf.clauses[1].literals ==
        std::vector<Literal>{testutil::pos(v, "b"), testutil::neg(v, "c")});
}

TEST_CASE("to_cnf: duplicate literals inside a clause collapse") {
  Vocab v = abc();
  Cnf cnf = to_cnf(parse_formula("\"a\" | \"a\"", v));
  REQUIRE(cnf.clauses.size() == 1);
  CHECK(cnf.clauses[0].literals.size() == 1);
}

TEST_CASE("to_cnf: tautological clause is retained") {
  Vocab v = abc();
  Cnf cnf = to_cnf(parse_formula("\"a\" | !\"a\"", v));
  REQUIRE(cnf.clauses.size() == 1);
  CHECK(cnf.clauses[0].literals.size() == 2);
}

TEST_CASE("to_cnf: clause-count guard") {
  Vocab v = abc();
  // OR of three conjunctions distributes to 27 clauses.
  Formula f = parse_formula(
      "(\"a\" & \"b\" & \"c\") | (\"a\" & \"b\" & \"c\") | (\"a\" & \"b\" & \"c\")", v);
  CHECK_THROWS_AS(to_cnf(f, 8), Error);
  CHECK_NOTHROW(to_cnf(f, 27));
}

TEST_CASE("evaluate: containment semantics") {
  Vocab v = abc();
  auto y = v.encode("a b c");
  CHECK(clause_values(testutil::cnf({{testutil::pos(v, "b")}}), y) ==
        std::vector<bool>{true});
  CHECK(clause_values(testutil::cnf({{testutil::neg(v, "a")}}), v.encode("a")) ==
        std::vector<bool>{false});
  Cnf two = testutil::cnf({{testutil::pos(v, "a"), testutil::pos(v, "b")},
                           {testutil::neg(v, "c")}});
  CHECK(clause_values(two, v.encode("b b")) == std::vector<bool>{true, true});

  CHECK(contains_phrase(v.encode("a b c"), testutil::phrase(v, "b c")));
  CHECK_FALSE(contains_phrase(v.encode("a b c"), testutil::phrase(v, "c b")));
  CHECK_FALSE(contains_phrase(v.encode("a"), testutil::phrase(v, "a b")));
}

TEST_CASE("build_cover_all") {
  Vocab v = testutil::make_vocab({"dog", "dogs", "run", "ran", "catch"});
  auto dog = testutil::phrase(v, "dog");
  auto dogs = testutil::phrase(v, "dogs");
  auto run = testutil::phrase(v, "run");
  auto ran = testutil::phrase(v, "ran");

  Cnf cnf = build_cover_all({{dog, dogs}, {run, ran}});
  REQUIRE(cnf.clauses.size() == 2);
  CHECK(cnf.clauses[0].literals ==
        std::vector<Literal>{{Polarity::kPositive, dog}, {Polarity::kPositive, dogs}});
  CHECK(cnf.clauses[1].literals ==
        std::vector<Literal>{{Polarity::kPositive, run}, {Polarity::kPositive, ran}});

  Cnf single = build_cover_all({{testutil::phrase(v, "catch")}});
  REQUIRE(single.clauses.size() == 1);
  CHECK(single.clauses[0].literals.size() == 1);

  CHECK(build_cover_all({}).clauses.empty());
  CHECK_THROWS_AS(build_cover_all({{}}), Error);
}

TEST_CASE("build_include_exclude") {
  Vocab v = testutil::make_vocab({"onion", "vegetables", "pork", "nurse_f", "nurse_m",
                                  "a", "b"});
  Cnf cnf = build_include_exclude(
      {{testutil::phrase(v, "onion"), testutil::phrase(v, "vegetables")}},
      {testutil::phrase(v, "pork")});
  REQUIRE(cnf.clauses.size() == 2);
  CHECK(cnf.clauses[0].literals.size() == 2);
  CHECK(cnf.clauses[1].literals ==
        std::vector<Literal>{testutil::neg(v, "pork")});

  Cnf gender = build_include_exclude({{testutil::phrase(v, "nurse_f")}},
                                     {testutil::phrase(v, "nurse_m")});
  REQUIRE(gender.clauses.size() == 2);
  CHECK(gender.clauses[0].literals[0].polarity == Polarity::kPositive);
  CHECK(gender.clauses[1].literals[0].polarity == Polarity::kNegative);

  Cnf only_neg = build_include_exclude({}, {testutil::phrase(v, "a"), testutil::phrase(v, "b")});
  REQUIRE(only_neg.clauses.size() == 2);
  CHECK(only_neg.clauses[0].literals[0].polarity == Polarity::kNegative);

  CHECK_THROWS_AS(
      build_include_exclude({{testutil::phrase(v, "pork")}}, {testutil::phrase(v, "pork")}),
      Error);
}

TEST_CASE("property: formula and its CNF agree on random sequences") {
  std::mt19937_64 rng(991);
  Vocab v = RandomCase::small_vocab(3);
  for (int trial = 0; trial < 120; ++trial) {
    Formula f = RandomCase::formula(rng, v, 8, 4, 2);
    Cnf cnf = to_cnf(f);
    for (const Clause& c : cnf.clauses) CHECK_FALSE(c.literals.empty());
    for (int s = 0; s < 30; ++s) {
      auto y = RandomCase::stream(rng, v, 12);
      CHECK(evaluate(f, y) == evaluate(cnf, y));
    }
  }
}

TEST_CASE("property: print/parse round trip is stable") {
  std::mt19937_64 rng(992);
  Vocab v = RandomCase::small_vocab(3);
  for (int trial = 0; trial < 200; ++trial) {
    Formula f = RandomCase::formula(rng, v, 8, 4, 2);
    Formula once = parse_formula(to_dsl(f, v), v);
    Formula twice = parse_formula(to_dsl(once, v), v);
    CHECK(once == twice);
  }
}

TEST_CASE("cnf printer parses back to an equivalent formula") {
  std::mt19937_64 rng(993);
  Vocab v = RandomCase::small_vocab(3);
  for (int trial = 0; trial < 50; ++trial) {
    Cnf cnf = RandomCase::cnf(rng, v, 4, 3, 2);
    Cnf reparsed = to_cnf(parse_formula(to_dsl(cnf, v), v));
    for (int s = 0; s < 20; ++s) {
      auto y = RandomCase::stream(rng, v, 10);
      CHECK(evaluate(cnf, y) == evaluate(reparsed, y));
    }
  }
}
