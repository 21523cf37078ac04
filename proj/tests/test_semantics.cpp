#include "doctest.h"
#include "helpers.hpp"
#include "trilog/parser.hpp"
#include "trilog/semantics.hpp"

using namespace trilog;
using trilog::testing::pipeline;

namespace {

// int = {1,2}, atom = {a}, nat = {0, s(0), s(s(0)), s(s(s(0)))} at depth 3.
trilog::testing::Pipeline nat_world() {
  return pipeline(
      ":- type nat = 0 + s(nat).\n"
      "p(X) :- X = 1, X = 2.\n"
      "q(X) :- X = a.\n"
      "r(X) :- X = 0 ; X = s(Y), r(Y).\n");
}

}  // namespace

TEST_CASE("eval_term reads variables from the state") {
  auto w = nat_world();
  Value v = Value::base("int", "2");
  State s{{"X", v}};
  CHECK(eval_term(Term::var("X"), w.built.interpretation, s, w.built.universe) == v);
}

TEST_CASE("eval_term maps constants through the interpretation") {
  auto w = nat_world();
  State s;
  Value zero = eval_term(Term::constant("0"), w.built.interpretation, s, w.built.universe);
  CHECK(zero == Value::tree("0"));
  CHECK(w.built.universe.domain_of(zero) == "nat");
}

TEST_CASE("eval_term yields wrong on a domain mismatch") {
  // s expects the nat domain; handing it an atom value must be wrong.
  auto w = nat_world();
  State s{{"X", Value::base("atom", "a")}};
  Value v = eval_term(Term::compound("s", {Term::var("X")}), w.built.interpretation, s,
                      w.built.universe);
  CHECK(v.is_wrong());
}

TEST_CASE("wrong propagates through nested terms") {
  auto w = nat_world();
  State s{{"X", Value::base("atom", "a")}};
  Term t = Term::compound("s", {Term::compound("s", {Term::var("X")})});
  CHECK(eval_term(t, w.built.interpretation, s, w.built.universe).is_wrong());
}

TEST_CASE("eval_term produces no boolean values for term syntax") {
  auto w = nat_world();
  for (const auto& v : w.built.universe.enumerable_values()) {
    State s{{"X", v}};
    Value r = eval_term(Term::compound("s", {Term::var("X")}), w.built.interpretation, s,
                        w.built.universe);
    CHECK(r.kind != Value::Kind::Bool);
  }
}

TEST_CASE("eval_unify three-way outcome") {
  auto w = nat_world();
  State s{{"X", Value::base("int", "1")}};
  CHECK(eval_unify(Term::constant("1"), Term::constant("1"), w.built.interpretation, s,
                   w.built.universe) == Tv::True);
  CHECK(eval_unify(Term::var("X"), Term::constant("2"), w.built.interpretation, s,
                   w.built.universe) == Tv::False);
  CHECK(eval_unify(Term::var("X"), Term::constant("a"), w.built.interpretation, s,
                   w.built.universe) == Tv::Wrong);
}

TEST_CASE("eval_unify is symmetric over the whole universe") {
  auto w = nat_world();
  for (const auto& v1 : w.built.universe.enumerable_values()) {
    for (const auto& v2 : w.built.universe.enumerable_values()) {
      State s{{"X", v1}, {"Y", v2}};
      Tv ab = eval_unify(Term::var("X"), Term::var("Y"), w.built.interpretation, s,
                         w.built.universe);
      Tv ba = eval_unify(Term::var("Y"), Term::var("X"), w.built.interpretation, s,
                         w.built.universe);
      CHECK(ab == ba);
    }
  }
}

TEST_CASE("eval_call applies the predicate table inside its signature") {
  auto w = nat_world();
  // r is the closure of 0 under s: true on every nat within depth.
  State s{{"V", Value::tree("s", {Value::tree("0")})}};
  Goal call = Goal::call("r", {Term::var("V")});
  CHECK(eval_call(call, w.built.interpretation, s, w.built.universe) == Tv::True);

  State bad{{"V", Value::base("int", "1")}};
  CHECK(eval_call(call, w.built.interpretation, bad, w.built.universe) == Tv::Wrong);
}

TEST_CASE("a wrong argument makes the call wrong") {
  auto w = nat_world();
  State s{{"X", Value::base("atom", "a")}};
  Goal call = Goal::call("r", {Term::var("Y")});
  // Evaluate through a compound argument that goes wrong first.
  Goal with_term = Goal::call("r", {Term::compound("s", {Term::var("X")})});
  CHECK(eval_call(with_term, w.built.interpretation, s, w.built.universe) == Tv::Wrong);
  (void)call;
}

TEST_CASE("eval_seq folds conjunction") {
  auto w = nat_world();
  State s{{"X", Value::base("int", "1")}};
  GoalSeq fails{Goal::unify(Term::var("X"), Term::constant("1")),
                Goal::unify(Term::var("X"), Term::constant("2"))};
  CHECK(eval_seq(fails, w.built.interpretation, s, w.built.universe) == Tv::False);
  GoalSeq wrongs{Goal::unify(Term::var("X"), Term::constant("1")),
                 Goal::unify(Term::var("X"), Term::constant("a"))};
  CHECK(eval_seq(wrongs, w.built.interpretation, s, w.built.universe) == Tv::Wrong);
  GoalSeq single{Goal::unify(Term::var("X"), Term::constant("1"))};
  CHECK(eval_seq(single, w.built.interpretation, s, w.built.universe) == Tv::True);
}

TEST_CASE("eval_body folds disjunction over one state per branch") {
  auto w = pipeline("p(X) :- X = 1 ; X = 2.\n");
  const Clause* c = w.program.single_clause("p");
  State s1{{"X", Value::base("int", "1")}};
  State s2{{"X", Value::base("int", "2")}};
  CHECK(eval_body(c->body, w.built.interpretation, {s1, s2}, w.built.universe) ==
        Tv::True);  // true or false
  CHECK(eval_body(c->body, w.built.interpretation, {s2, s1}, w.built.universe) ==
        Tv::False);  // false or false
  CHECK_THROWS_AS(
      eval_body(c->body, w.built.interpretation, {s1}, w.built.universe),
      std::invalid_argument);

  auto wq = pipeline("q(X) :- X = 1 ; X = a.\n");
  const Clause* q = wq.program.single_clause("q");
  State sa{{"X", Value::base("atom", "a")}};
  State si{{"X", Value::base("int", "1")}};
  // Branch two compares an atom against 1: wrong poisons the disjunction.
  CHECK(eval_body(q->body, wq.built.interpretation, {si, si}, wq.built.universe) ==
        Tv::Wrong);
  CHECK(eval_body(q->body, wq.built.interpretation, {si, sa}, wq.built.universe) ==
        Tv::True);
}

TEST_CASE("clause evaluation over every state stays boolean for one int domain") {
  auto w = pipeline("p(X) :- X = 1, X = 2.\n");
  const Clause* c = w.program.single_clause("p");
  StateEnumerator en = enumerate_states({"X"}, w.built.universe);
  State s;
  while (en.next(s)) {
    Tv v = eval_clause(*c, w.built.interpretation, {s}, w.built.universe);
    CHECK((v == Tv::True || v == Tv::False));
  }
}

TEST_CASE("mixed-domain body makes the clause wrong in every state") {
  auto w = pipeline("q(X) :- X = 1, X = a.\n");
  const Clause* c = w.program.single_clause("q");
  StateEnumerator en = enumerate_states({"X"}, w.built.universe);
  State s;
  std::size_t states = 0;
  while (en.next(s)) {
    ++states;
    CHECK(eval_clause(*c, w.built.interpretation, {s}, w.built.universe) == Tv::Wrong);
  }
  CHECK(states == 2);
}

TEST_CASE("true body with true head call gives true") {
  auto w = pipeline("p(X) :- X = 1.\n");
  const Clause* c = w.program.single_clause("p");
  State s{{"X", Value::base("int", "1")}};
  CHECK(eval_clause(*c, w.built.interpretation, {s}, w.built.universe) == Tv::True);
}

TEST_CASE("enumerate_states covers the basic and tree domains exactly once") {
  auto w = pipeline("p(X) :- X = 1, X = 2.\nq(Y) :- Y = a.\n");
  StateEnumerator one = enumerate_states({"X"}, w.built.universe);
  State s;
  std::size_t n = 0;
  std::set<Value> seen;
  while (one.next(s)) {
    ++n;
    seen.insert(s.at("X"));
  }
  CHECK(n == 3);  // {1,2} + {a}
  CHECK(seen.size() == 3);

  StateEnumerator zero = enumerate_states({}, w.built.universe);
  n = 0;
  while (zero.next(s)) ++n;
  CHECK(n == 1);  // single empty state

  StateEnumerator two = enumerate_states({"X", "Y"}, w.built.universe);
  CHECK(two.count() == 9);
}

TEST_CASE("state enumeration respects the configured cap") {
  auto w = pipeline("p(X) :- X = 1, X = 2.\nq(Y) :- Y = a.\n");
  Universe small = w.built.universe;
  small.max_states = 8;
  CHECK_THROWS_AS(enumerate_states({"A", "B", "C"}, small), UniverseTooLarge);
}

TEST_CASE("universe domains are pairwise disjoint and wrong is a singleton") {
  auto w = nat_world();
  const auto& domains = w.built.universe.domains;
  for (std::size_t i = 0; i < domains.size(); ++i) {
    CHECK(!domains[i].members.empty());
    for (std::size_t j = i + 1; j < domains.size(); ++j) {
      for (const auto& v : domains[i].members) CHECK(!domains[j].contains(v));
    }
  }
  const Domain* wrong = w.built.universe.find_domain("wrong");
  REQUIRE(wrong != nullptr);
  CHECK(wrong->members.size() == 1);
  CHECK(wrong->members[0].is_wrong());
}
