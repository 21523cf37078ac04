#include "doctest.h"
#include "helpers.hpp"
#include "trilog/ast.hpp"
#include "trilog/parser.hpp"
#include "trilog/soundness.hpp"

using namespace trilog;

TEST_CASE("parsing a conjunction of unifications") {
  Program p = parse_program("p(X) :- X = 1, X = 2.");
  REQUIRE(p.clauses.size() == 1);
  const Clause& c = p.clauses[0];
  CHECK(c.predicate == "p");
  REQUIRE(c.head_args.size() == 1);
  CHECK(c.head_args[0] == Term::var("X"));
  REQUIRE(c.body.size() == 1);
  REQUIRE(c.body[0].size() == 2);
  CHECK(c.body[0][0] == Goal::unify(Term::var("X"), Term::constant("1")));
  CHECK(c.body[0][1] == Goal::unify(Term::var("X"), Term::constant("2")));
}

TEST_CASE("empty input parses to the empty program") {
  Program p = parse_program("");
  CHECK(p.clauses.empty());
  CHECK(p.type_decls.empty());
  CHECK(pretty(p).empty());
}

TEST_CASE("two-clause append parses to two raw clauses") {
  Program p = parse_program(
      "append([],X,X).\n"
      "append([X|L],Y,[X|L1]) :- append(L,Y,L1).\n");
  REQUIRE(p.clauses.size() == 2);
  CHECK(p.clauses[0].predicate == "append");
  CHECK(p.clauses[1].predicate == "append");
  CHECK(p.clauses_of("append").size() == 2);
  // The fact parses as a single empty goal sequence.
  CHECK(p.clauses[0].body.size() == 1);
  CHECK(p.clauses[0].body[0].empty());
  // List sugar desugars to [] and the cons functor.
  CHECK(p.clauses[0].head_args[0] == Term::constant("[]"));
  CHECK(p.clauses[1].head_args[0] ==
        Term::compound("[|]", {Term::var("X"), Term::var("L")}));
}

TEST_CASE("list sugar round trips") {
  Program p = parse_program("p([1,2|T]) :- q([]).\nq(X) :- X = [a].\n");
  Program again = parse_program(pretty(p));
  CHECK(again == p);
}

TEST_CASE("comments and parenthesized branches") {
  Program p = parse_program(
      "% a comment\n"
      "add(X1,X2,X3) :- ( X1 = 0, X2 = X, X3 = X ) ;\n"
      "                 ( X1 = s(X1a), X2 = Y, X3 = s(Z),\n"
      "                   X4 = X1a, X5 = Y, X6 = Z, add(X4,X5,X6) ) .\n");
  REQUIRE(p.clauses.size() == 1);
  CHECK(p.clauses[0].body.size() == 2);
  CHECK(p.clauses[0].body[0].size() == 3);
  CHECK(p.clauses[0].body[1].size() == 7);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_program("p(X) :- X = .\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.pos.line == 1);
    CHECK(e.pos.column > 0);
  }
}

TEST_CASE("duplicate type declarations are rejected") {
  CHECK_THROWS_AS(parse_program(":- type t = a + b.\n:- type t = c.\n"), ParseError);
}

TEST_CASE("zero-arity predicates are rejected with a clear message") {
  CHECK_THROWS_AS(parse_program("p."), ParseError);
  CHECK_THROWS_AS(parse_program("p :- q(1)."), ParseError);
}

TEST_CASE("or_degree") {
  Program p = parse_program("p(X) :- X = 1 ; X = a.\nq(Y) :- Y = 1.\n");
  CHECK(or_degree(p.clauses[0]) == 2);
  CHECK(or_degree(p.clauses[1]) == 1);
  CHECK(or_degree(Term::var("X")) == 1);
  CHECK(or_degree(p.clauses[0].body[0][0]) == 1);
}

TEST_CASE("type declarations parse and round trip") {
  Program p = parse_program(":- type list(A) = [] + [A|list(A)].\np(X) :- X = [].\n");
  REQUIRE(p.type_decls.size() == 1);
  CHECK(p.type_decls[0].name == "list");
  CHECK(p.type_decls[0].params == std::vector<std::string>{"A"});
  Program again = parse_program(pretty(p));
  CHECK(again == p);
}

TEST_CASE("pretty output reparses to an equal program across generated corpus") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Program p = generate_program(seed);
    Program again = parse_program(pretty(p));
    CAPTURE(seed);
    CHECK(again == p);
  }
}

TEST_CASE("pretty round trip on the normalized add program") {
  Program raw = parse_program(
      "add(0,X,X).\n"
      "add(s(X),Y,s(Z)) :- add(X,Y,Z).\n");
  Program norm = normalize(raw);
  Program again = parse_program(pretty(norm));
  CHECK(again == norm);
}
