#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "trilog/parser.hpp"
#include "trilog/type_semantics.hpp"
#include "trilog/soundness.hpp"
#include "trilog/typechecker.hpp"

using namespace trilog;
using trilog::testing::check_only;
using trilog::testing::pipeline;
using trilog::testing::ty;

namespace {

bool alpha_variant(const SimpleType& a, const SimpleType& b) {
  return match_type(a, b).has_value() && match_type(b, a).has_value();
}

const Derivation& premise_for(const Derivation& d, Rule r) {
  for (const auto& p : d.premises)
    if (p.rule == r) return p;
  REQUIRE(false);
  return d;
}

}  // namespace

TEST_CASE("context_sum merges disjoint and shared subjects") {
  Context g1{{"X", ty("int")}};
  Context g2{{"X", ty("atom")}};
  Context g3{{"Y", ty("atom")}};
  CHECK(context_sum(g1, g2) == Context{{"X", normalize_sum(ty("int + atom"))}});
  CHECK(context_sum(g1, g3) == Context{{"X", ty("int")}, {"Y", ty("atom")}});
  CHECK(context_sum(g1, {}) == g1);
  CHECK(context_sum({}, g1) == g1);
}

TEST_CASE("context_sum is commutative and associative up to normalization") {
  std::mt19937_64 rng(5);
  std::vector<SimpleType> pool{ty("int"), ty("atom"), ty("int + atom"), ty("0"),
                               ty("mu a. ([] + [int|a])")};
  auto random_ctx = [&]() {
    Context g;
    const char* names[] = {"X", "Y", "Z"};
    for (const char* n : names)
      if (rng() % 2) g[n] = pool[rng() % pool.size()];
    return g;
  };
  for (int i = 0; i < 50; ++i) {
    Context a = random_ctx(), b = random_ctx(), c = random_ctx();
    CHECK(context_sum(a, b) == context_sum(b, a));
    CHECK(context_sum(context_sum(a, b), c) == context_sum(a, context_sum(b, c)));
  }
}

TEST_CASE("check_term: variables read the context") {
  DeclaredTypes decls;
  auto r = check_term(Context{{"X", ty("int")}}, Term::var("X"), decls);
  REQUIRE(std::holds_alternative<TermCheck>(r));
  CHECK(std::get<TermCheck>(r).type == ty("int"));
  CHECK(std::get<TermCheck>(r).derivation.rule == Rule::VAR);

  auto missing = check_term(Context{}, Term::var("X"), decls);
  REQUIRE(std::holds_alternative<Diagnostic>(missing));
  CHECK(std::get<Diagnostic>(missing).kind == "UnboundVariable");
}

TEST_CASE("check_term: the empty list gets a fresh instance of its declared type") {
  auto w = check_only(":- type list(A) = [] + [A|list(A)].\n");
  auto r = check_term(Context{}, Term::constant("[]"), w.decls);
  REQUIRE(std::holds_alternative<TermCheck>(r));
  CHECK(alpha_variant(std::get<TermCheck>(r).type, ty("mu b. ([] + [A|b])")));
  CHECK(std::get<TermCheck>(r).derivation.rule == Rule::CST);
}

TEST_CASE("check_term: CPL instantiates the element type of a cons cell") {
  UniverseConfig config;
  config.extra_tokens["int"] = {"1"};
  auto w = pipeline(":- type list(A) = [] + [A|list(A)].\n", config);
  Term cell = Term::compound("[|]", {Term::constant("1"), Term::constant("[]")});
  auto r = check_term(Context{}, cell, w.decls);
  REQUIRE(std::holds_alternative<TermCheck>(r));
  SimpleType got = std::get<TermCheck>(r).type;
  CHECK(type_equal(got, ty("mu b. ([] + [int|b])")));

  // The evaluated value inhabits the reported type.
  Value v = eval_term(cell, w.built.interpretation, {}, w.built.universe);
  CHECK(tsem(got, w.built.interpretation, w.built.universe).count(v) == 1);
}

TEST_CASE("check_term: undeclared functors are reported") {
  DeclaredTypes decls;
  auto r = check_term(Context{}, Term::compound("f", {Term::constant("1")}), decls);
  REQUIRE(std::holds_alternative<Diagnostic>(r));
  CHECK(std::get<Diagnostic>(r).kind == "UndeclaredSymbol");
}

TEST_CASE("check_goal: unification at a common type") {
  DeclaredTypes decls;
  PredicateTypes known;
  Goal g = Goal::unify(Term::var("X"), Term::constant("1"));
  auto r = check_goal(Context{{"X", ty("int")}}, g, decls, known);
  REQUIRE(std::holds_alternative<Derivation>(r));
  const Derivation& d = std::get<Derivation>(r);
  CHECK(d.rule == Rule::UNF);
  CHECK(d.type.kind == SimpleType::Kind::Bool);
  CHECK(premise_for(d, Rule::VAR).type == ty("int"));
  CHECK(premise_for(d, Rule::CST).type == ty("int"));

  Goal bad = Goal::unify(Term::var("X"), Term::constant("a"));
  auto rb = check_goal(Context{{"X", ty("int")}}, bad, decls, known);
  REQUIRE(std::holds_alternative<Diagnostic>(rb));
  CHECK(std::get<Diagnostic>(rb).kind == "UnifyTypeMismatch");
}

TEST_CASE("check_goal: calls require argument subtypes of the callee") {
  auto w = check_only(":- type list(A) = [] + [A|list(A)].\n"
                      "append([],X,X).\n"
                      "append([X|L],Y,[X|L1]) :- append(L,Y,L1).\n");
  REQUIRE(w.checked.ok);
  PredicateTypes known{{"append", *w.checked.find("append")->scheme}};
  Context g{{"A", ty("mu b. ([] + [int|b])")},
            {"B", ty("mu b. ([] + [int|b])")},
            {"C", ty("mu b. ([] + [int|b])")}};
  Goal call = Goal::call("append", {Term::var("A"), Term::var("B"), Term::var("C")});
  auto r = check_goal(g, call, w.decls, known);
  REQUIRE(std::holds_alternative<Derivation>(r));
  CHECK(std::get<Derivation>(r).rule == Rule::CLL);

  Context bad{{"A", ty("mu b. ([] + [int|b])")}, {"B", ty("int")}, {"C", ty("int")}};
  auto rb = check_goal(bad, call, w.decls, known);
  REQUIRE(std::holds_alternative<Diagnostic>(rb));
  CHECK(std::get<Diagnostic>(rb).kind == "CallArgNotSubtype");
}

TEST_CASE("check_clause reproduces the two-branch sum derivation") {
  Program p = parse_program("p(X) :- X = 1 ; X = a.\n");
  DeclaredTypes decls;
  PredicateTypes known;
  std::vector<Context> branches{{{"X", ty("int")}}, {{"X", ty("atom")}}};
  auto r = check_clause(branches, p.clauses[0], decls, known);
  REQUIRE(std::holds_alternative<Derivation>(r));
  const Derivation& d = std::get<Derivation>(r);
  CHECK(d.rule == Rule::CLS);
  CHECK(type_equal(d.ctx.at("X"), ty("int + atom")));
  CHECK(d.contains_rule(Rule::VAR));
  CHECK(d.contains_rule(Rule::CST));
  CHECK(d.contains_rule(Rule::UNF));
  CHECK(d.contains_rule(Rule::CON));
  CHECK(validate_derivation(d, decls, known) == std::nullopt);
}

TEST_CASE("check_clause accepts the annotated nat typing of add via RCLS") {
  auto w = check_only(":- type nat = 0 + s(nat).\n"
                      "add(0,X,X).\n"
                      "add(s(X),Y,s(Z)) :- add(X,Y,Z).\n");
  const Clause* add = w.program.single_clause("add");
  REQUIRE(add != nullptr);
  SimpleType nat = w.decls.named.at("nat").translation;
  std::vector<Context> branches(2);
  for (const auto& v : vars_of(*add)) branches[0][v] = nat;
  branches[0].erase(vars_of(add->body[1]).empty() ? "" : "");
  branches[0].clear();
  for (const auto& t : add->head_args) branches[0][t.name] = nat;
  for (const auto& v : vars_of(add->body[0])) branches[0][v] = nat;
  for (const auto& t : add->head_args) branches[1][t.name] = nat;
  for (const auto& v : vars_of(add->body[1])) branches[1][v] = nat;

  PredicateTypes known;
  auto r = check_clause(branches, *add, w.decls, known);
  REQUIRE(std::holds_alternative<Derivation>(r));
  const Derivation& d = std::get<Derivation>(r);
  CHECK(d.rule == Rule::RCLS);
  CHECK(validate_derivation(d, w.decls, known) == std::nullopt);
  for (const auto& t : add->head_args) CHECK(type_equal(d.ctx.at(t.name), nat));
}

TEST_CASE("single-branch clauses degenerate to their branch context") {
  Program p = parse_program("p(X) :- X = 1.\n");
  DeclaredTypes decls;
  PredicateTypes known;
  std::vector<Context> branches{{{"X", ty("int")}}};
  auto r = check_clause(branches, p.clauses[0], decls, known);
  REQUIRE(std::holds_alternative<Derivation>(r));
  CHECK(std::get<Derivation>(r).rule == Rule::CLS);
  CHECK(std::get<Derivation>(r).ctx == branches[0]);
}

TEST_CASE("reconstruct_branch_context solves, clashes, or stays fresh") {
  DeclaredTypes decls;
  PredicateTypes known;
  int counter = 0;

  Program p1 = parse_program("p(X) :- X = 1.\n");
  auto r1 = reconstruct_branch_context(p1.clauses[0].body[0], {"X"}, decls, known,
                                       nullptr, &counter);
  REQUIRE(std::holds_alternative<Context>(r1));
  CHECK(std::get<Context>(r1).at("X") == ty("int"));

  Program p2 = parse_program("p(X) :- X = 1, X = a.\n");
  auto r2 = reconstruct_branch_context(p2.clauses[0].body[0], {"X"}, decls, known,
                                       nullptr, &counter);
  REQUIRE(std::holds_alternative<Diagnostic>(r2));
  const Diagnostic& diag = std::get<Diagnostic>(r2);
  CHECK(diag.kind == "UnsatisfiableConstraints");
  CHECK(diag.expected == "int");
  CHECK(diag.found == "atom");

  Program p3 = parse_program("p(X, Y) :- X = 1.\n");
  auto r3 = reconstruct_branch_context(p3.clauses[0].body[0], {"X", "Y"}, decls, known,
                                       nullptr, &counter);
  REQUIRE(std::holds_alternative<Context>(r3));
  CHECK(std::get<Context>(r3).at("Y").kind == SimpleType::Kind::Var);
}

TEST_CASE("occurs check rejects infinite types") {
  auto w = check_only(":- type list(A) = [] + [A|list(A)].\np(X) :- X = 1.\n");
  Program p = parse_program("q(X, Y) :- X = [X|Y].\n");
  int counter = 0;
  PredicateTypes known;
  auto r = reconstruct_branch_context(p.clauses[0].body[0], {"X", "Y"}, w.decls, known,
                                      nullptr, &counter);
  REQUIRE(std::holds_alternative<Diagnostic>(r));
  CHECK(std::get<Diagnostic>(r).kind == "OccursCheck");
}

TEST_CASE("check_program types the sum example and validates it") {
  auto w = check_only("p(X) :- X = 1 ; X = a.\n");
  REQUIRE(w.checked.ok);
  const PredicateCheck* pc = w.checked.find("p");
  REQUIRE(pc != nullptr);
  REQUIRE(pc->scheme.has_value());
  CHECK(type_equal(pc->scheme->body.arg_types[0], ty("int + atom")));
  REQUIRE(pc->derivation.has_value());
  CHECK(pc->derivation->rule == Rule::CLS);
}

TEST_CASE("check_program types append polymorphically and rejects bad calls") {
  std::string defs =
      ":- type list(A) = [] + [A|list(A)].\n"
      "append([],X,X).\n"
      "append([X|L],Y,[X|L1]) :- append(L,Y,L1).\n";
  auto ok = check_only(defs);
  REQUIRE(ok.checked.ok);
  const TypeScheme& scheme = *ok.checked.find("append")->scheme;
  SimpleType list_a = ty("mu b. ([] + [A|b])");
  REQUIRE(scheme.body.arg_types.size() == 3);
  for (const auto& t : scheme.body.arg_types) CHECK(alpha_variant(t, list_a));
  // All three arguments share one element variable.
  CHECK(scheme.quantified.size() == 1);
  CHECK(ok.checked.find("append")->recursive);

  Program bad = normalize(parse_program(
      defs + "caller(X1,X2,X3) :- X1 = [], X2 = 1, X3 = 1, append(X1,X2,X3).\n"));
  DeclaredTypes decls = build_decl_table(bad);
  CheckResult r = check_program(bad, decls);
  CHECK(!r.ok);
  REQUIRE(!r.find("caller")->ok);
  CHECK(r.find("caller")->errors[0].kind == "CallArgNotSubtype");
}

TEST_CASE("the dummy declaration makes the same call well-typed") {
  auto w = check_only(
      ":- type dummy(A) = 1 + [] + [A|dummy(A)].\n"
      "append([],X,X).\n"
      "append([X|L],Y,[X|L1]) :- append(L,Y,L1).\n"
      "caller(X1,X2,X3) :- X1 = [], X2 = 1, X3 = 1, append(X1,X2,X3).\n");
  CHECK(w.checked.ok);
  CHECK(w.checked.find("caller")->ok);
}

TEST_CASE("monomorphism violations in recursive clauses are rejected") {
  auto w = check_only(
      "f(X) :- X = 1 ; X = a, Y = 1, f(Y).\n");
  CHECK(!w.checked.ok);
  bool found = false;
  for (const auto& d : w.checked.find("f")->errors)
    if (d.kind == "MonomorphismViolation" || d.kind == "UnsatisfiableConstraints")
      found = true;
  CHECK(found);
}

TEST_CASE("mutual recursion is rejected with a cycle report") {
  Program p = normalize(parse_program(
      "even(X) :- X = 0 ; X = s(Y), odd(Y).\n"
      "odd(X) :- X = s(Y), even(Y).\n"));
  // Note: needs the nat declaration for symbols, but the cycle is caught
  // before any typing happens.
  DeclaredTypes decls;
  CheckResult r = check_program(p, decls);
  CHECK(!r.ok);
  REQUIRE(!r.global.empty());
  CHECK(r.global[0].kind == "CyclicCallGraph");
}

TEST_CASE("the validator rejects corrupted derivations") {
  auto w = check_only("p(X) :- X = 1 ; X = a.\n");
  REQUIRE(w.checked.ok);
  Derivation d = *w.checked.find("p")->derivation;
  PredicateTypes known;
  REQUIRE(validate_derivation(d, w.decls, known) == std::nullopt);

  Derivation corrupted = d;
  corrupted.ctx["X"] = ty("int");  // conclusion no longer the branch sum
  CHECK(validate_derivation(corrupted, w.decls, known) != std::nullopt);

  Derivation swapped = d;
  swapped.rule = Rule::RCLS;  // wrong rule for a non-recursive predicate
  CHECK(validate_derivation(swapped, w.decls, known) != std::nullopt);
}

TEST_CASE("annotations bypass reconstruction but are still validated") {
  Program p = normalize(parse_program("p(X) :- X = 1 ; X = a.\n"));
  DeclaredTypes decls = build_decl_table(p);
  Annotations ann{{"p", {{{"X", ty("int")}}, {{"X", ty("atom")}}}}};
  CheckResult good = check_program(p, decls, &ann);
  CHECK(good.ok);
  CHECK(type_equal(good.find("p")->scheme->body.arg_types[0], ty("int + atom")));

  Annotations bad{{"p", {{{"X", ty("atom")}}, {{"X", ty("atom")}}}}};
  CheckResult rejected = check_program(p, decls, &bad);
  CHECK(!rejected.ok);
}

TEST_CASE("alias declarations neither fake a tree domain nor weaken the union guard") {
  // "scalar" claims no constant or constructor: it is an alias for a
  // union of basic domains, so variables unified at it still cross
  // domains and must be narrowed to one summand.
  auto w = pipeline(
      ":- type scalar = int + atom.\n"
      "q(X) :- X = 1 ; X = a.\n"
      "r(X, Y) :- q(X), X = Y.\n");
  REQUIRE(w.checked.ok);
  SimpleType rx = w.checked.find("r")->scheme->body.arg_types[0];
  CHECK(rx.kind != SimpleType::Kind::Sum);
  for (const auto& d : w.built.universe.domains) CHECK(!d.members.empty());
  VerifyReport report = verify_soundness(w.program, w.decls, {}, w.checked);
  CHECK(report.ok);
}

TEST_CASE("variable-to-variable unification across domains is rejected") {
  // q admits both domains, so an unconstrained shared variable would sit
  // at a union type; the single-domain side condition forces a summand.
  auto w = check_only(
      "q(X) :- X = 1 ; X = a.\n"
      "r(X, Y) :- q(X), X = Y, Y = a.\n");
  CHECK(w.checked.ok);
  CHECK(type_equal(w.checked.find("r")->scheme->body.arg_types[0], ty("atom")));

  auto unsat = check_only("r(X, Y) :- X = 1, Y = a, X = Y.\n");
  CHECK(!unsat.checked.ok);
}
