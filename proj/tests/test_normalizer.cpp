#include <functional>
#include <map>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "trilog/normalizer.hpp"
#include "trilog/parser.hpp"
#include "trilog/soundness.hpp"

using namespace trilog;

namespace {

// Deterministic raw (multi-clause, unflattened) programs over the
// constants 1 and 2.
Program random_raw_program(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 17);
  auto below = [&](std::size_t n) { return n ? rng() % n : 0; };
  Program p;
  std::size_t n_preds = 1 + below(2);
  std::vector<std::size_t> arity;
  for (std::size_t i = 0; i < n_preds; ++i) arity.push_back(1 + below(2));
  const char* vars[] = {"X", "Y", "Z"};
  auto term = [&]() {
    if (below(2)) return Term::var(vars[below(3)]);
    return Term::constant(below(2) ? "1" : "2");
  };
  for (std::size_t i = 0; i < n_preds; ++i) {
    std::size_t n_clauses = 1 + below(3);
    for (std::size_t ci = 0; ci < n_clauses; ++ci) {
      Clause c;
      c.predicate = "p" + std::to_string(i);
      for (std::size_t a = 0; a < arity[i]; ++a) c.head_args.push_back(term());
      std::size_t alts = 1 + below(2);
      for (std::size_t alt = 0; alt < alts; ++alt) {
        GoalSeq seq;
        std::size_t goals = below(4);
        for (std::size_t g = 0; g < goals; ++g) {
          if (i > 0 && below(3) == 0) {
            std::size_t callee = below(i);
            std::vector<Term> args;
            for (std::size_t a = 0; a < arity[callee]; ++a) args.push_back(term());
            seq.push_back(Goal::call("p" + std::to_string(callee), std::move(args)));
          } else {
            seq.push_back(Goal::unify(term(), term()));
          }
        }
        if (seq.empty()) seq.push_back(Goal::unify(term(), term()));
        c.body.push_back(std::move(seq));
      }
      p.clauses.push_back(std::move(c));
    }
  }
  return p;
}

Tv oracle_unify_values(const Value& a, const Value& b, const Universe& u) {
  if (a == b && !a.is_wrong()) return Tv::True;
  if (!a.is_wrong() && !b.is_wrong() && u.domain_of(a) == u.domain_of(b))
    return Tv::False;
  return Tv::Wrong;
}

}  // namespace

TEST_CASE("add/3 normalizes to its published normal form") {
  Program raw = parse_program(
      "add(0,X,X).\n"
      "add(s(X),Y,s(Z)) :- add(X,Y,Z).\n");
  Program norm = normalize(raw);
  Program expected = parse_program(
      "add(A1,A2,A3) :- ( A1 = 0, A2 = X, A3 = X ) ;\n"
      "                 ( A1 = s(Xp), A2 = Y, A3 = s(Z),\n"
      "                   V1 = Xp, V2 = Y, V3 = Z, add(V1,V2,V3) ).\n");
  CHECK(alpha_equivalent(norm, expected));
  CHECK(is_normal(norm));
}

TEST_CASE("is_normal classification") {
  Program ex3 = parse_program(
      "add(X1,X2,X3) :- ( X1 = 0, X2 = X, X3 = X ) ;\n"
      "                 ( X1 = s(Xp), X2 = Y, X3 = s(Z),\n"
      "                   X4 = Xp, X5 = Y, X6 = Z, add(X4,X5,X6) ).\n");
  CHECK(is_normal(ex3));
  Program raw = parse_program("add(0,X,X).\nadd(s(X),Y,s(Z)) :- add(X,Y,Z).\n");
  CHECK(!is_normal(raw));
  CHECK(is_normal(Program{}));
}

TEST_CASE("normal-form clauses pass through normalize unchanged") {
  Program p = parse_program("p(X) :- X = 1 ; X = a.\n");
  CHECK(is_normal(p));
  CHECK(normalize(p) == p);
}

TEST_CASE("normalize is idempotent up to renaming") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CAPTURE(seed);
    Program raw = random_raw_program(seed);
    Program once = normalize(raw);
    CHECK(is_normal(once));
    Program twice = normalize(once);
    CHECK(alpha_equivalent(twice, once));
  }
}

TEST_CASE("branches share head variables only") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Program once = normalize(random_raw_program(seed));
    for (const auto& c : once.clauses) {
      std::set<std::string> heads;
      for (const auto& t : c.head_args) heads.insert(t.name);
      std::map<std::string, std::size_t> owner;
      for (std::size_t k = 0; k < c.body.size(); ++k) {
        for (const auto& v : vars_of(c.body[k])) {
          if (heads.count(v)) continue;
          auto [it, fresh] = owner.emplace(v, k);
          CAPTURE(seed);
          CHECK(it->second == k);
          (void)fresh;
        }
      }
    }
  }
}

TEST_CASE("calls to undefined predicates are reported") {
  Program raw = parse_program("p(X) :- q(X).\n");
  CHECK_THROWS_AS(normalize(raw), NormalizeError);
  Program mixed = parse_program("p(X).\np(X, Y).\n");
  CHECK_THROWS_AS(normalize(mixed), NormalizeError);
}

// Oracle: each normalized branch simulates its source clause alternative.
// The original head arguments and goals are evaluated directly; the
// normalized branch is evaluated under the lifted state that forces each
// flattening variable to its source term's value.
TEST_CASE("normalized branch semantics matches direct evaluation") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CAPTURE(seed);
    Program raw = random_raw_program(seed);
    Program norm = normalize(raw);
    DeclaredTypes decls = build_decl_table(norm);
    UniverseConfig config;
    BuildResult built = build_interpretation(norm, decls, config);
    const Interpretation& interp = built.interpretation;
    const Universe& u = built.universe;

    for (const auto& name : raw.predicate_order()) {
      const Clause* nc = norm.single_clause(name);
      REQUIRE(nc != nullptr);

      // Source branches in normalization order.
      struct Src {
        const Clause* clause;
        const GoalSeq* goals;
      };
      auto defs = raw.clauses_of(name);
      if (defs.size() == 1 && is_normal_clause(*defs[0])) continue;  // kept verbatim
      std::vector<Src> sources;
      for (const auto* rc : defs)
        for (const auto& alt : rc->body) sources.push_back({rc, &alt});
      REQUIRE(sources.size() == nc->body.size());

      for (std::size_t k = 0; k < sources.size(); ++k) {
        const Src& src = sources[k];
        const GoalSeq& nb = nc->body[k];
        std::size_t n = nc->head_args.size();

        // Raw-side variables.
        std::vector<std::string> raw_vars;
        {
          std::set<std::string> seen;
          for (const auto& t : src.clause->head_args) collect_vars(t, raw_vars, seen);
          for (const auto& g : *src.goals) collect_vars(g, raw_vars, seen);
        }

        // Correspondence raw var -> normalized var, recovered from the
        // emitted head unifications and goals.
        std::map<std::string, std::string> lift;
        std::function<void(const Term&, const Term&)> align = [&](const Term& rt,
                                                                  const Term& nt) {
          if (rt.kind == Term::Kind::Var) {
            REQUIRE(nt.kind == Term::Kind::Var);
            lift[rt.name] = nt.name;
            return;
          }
          REQUIRE(rt.kind == nt.kind);
          for (std::size_t a = 0; a < rt.args.size(); ++a) align(rt.args[a], nt.args[a]);
        };
        for (std::size_t j = 0; j < n; ++j)
          align(src.clause->head_args[j], nb[j].right);
        // Walk raw goals against the tail of the normalized branch.
        struct Flatten {
          std::string var;     // fresh variable
          const Term* source;  // raw argument term
        };
        std::vector<Flatten> flattens;
        std::size_t ni = n;
        for (const auto& g : *src.goals) {
          if (g.kind == Goal::Kind::Unify) {
            align(g.left, nb[ni].left);
            align(g.right, nb[ni].right);
            ++ni;
          } else {
            for (const auto& arg : g.args) {
              REQUIRE(nb[ni].kind == Goal::Kind::Unify);
              align(arg, nb[ni].right);
              flattens.push_back({nb[ni].left.name, &arg});
              ++ni;
            }
            ++ni;  // the call itself
          }
        }
        REQUIRE(ni == nb.size());

        // Enumerate head values and raw variable states.
        std::vector<Value> all = u.enumerable_values();
        std::vector<std::string> env_vars = raw_vars;
        std::vector<std::string> head_slots;
        for (std::size_t j = 0; j < n; ++j) head_slots.push_back("@H" + std::to_string(j));
        std::vector<std::string> space = head_slots;
        space.insert(space.end(), env_vars.begin(), env_vars.end());
        StateEnumerator en(space, std::vector<std::vector<Value>>(space.size(), all),
                           1000000);
        State s;
        while (en.next(s)) {
          State raw_state;
          for (const auto& v : raw_vars) raw_state[v] = s.at(v);

          // Oracle: head unifications then goals, folded with tv_and.
          Tv expect = Tv::True;
          for (std::size_t j = 0; j < n; ++j) {
            Value head_v = s.at(head_slots[j]);
            Value arg_v = eval_term(src.clause->head_args[j], interp, raw_state, u);
            expect = tv_and(expect, oracle_unify_values(head_v, arg_v, u));
          }
          for (const auto& g : *src.goals) {
            if (g.kind == Goal::Kind::Unify) {
              expect = tv_and(expect, eval_unify(g.left, g.right, interp, raw_state, u));
            } else {
              Goal call = g;
              expect = tv_and(expect, eval_call(call, interp, raw_state, u));
            }
          }

          // Lifted normalized state: heads, renamed raws, forced flattens.
          State ns;
          for (std::size_t j = 0; j < n; ++j)
            ns[nc->head_args[j].name] = s.at(head_slots[j]);
          for (const auto& v : raw_vars) ns[lift.at(v)] = s.at(v);
          for (const auto& f : flattens) {
            Value forced = eval_term(*f.source, interp, raw_state, u);
            ns[f.var] = forced.is_wrong() ? all[0] : forced;
          }
          Tv got = eval_seq(nb, interp, ns, u);
          CAPTURE(name);
          CAPTURE(k);
          REQUIRE(got == expect);
        }
      }
    }
  }
}
