#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "trilog/types.hpp"

namespace trilog {

struct SourcePos {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourcePos& a, const SourcePos& b) {
    return a.line == b.line && a.column == b.column;
  }
};

/// A logic term: variable, constant, or compound with arity >= 1.
/// Variables start uppercase or with '_'; constants and functors start
/// lowercase or are integer literals. List sugar desugars to the constant
/// `[]` and the binary functor `[|]`.
struct Term {
  enum class Kind : int { Var, Const, Compound };

  Kind kind = Kind::Const;
  std::string name;
  std::vector<Term> args;  // Compound only

  friend int compare(const Term& a, const Term& b);
  friend bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Term& a, const Term& b) { return compare(a, b) != 0; }
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

  static Term var(std::string n) { return {Kind::Var, std::move(n), {}}; }
  static Term constant(std::string n) { return {Kind::Const, std::move(n), {}}; }
  static Term compound(std::string f, std::vector<Term> as) {
    return {Kind::Compound, std::move(f), std::move(as)};
  }
};

/// A body goal: unification `t1 = t2` or a predicate call.
struct Goal {
  enum class Kind : int { Unify, Call };

  Kind kind = Kind::Unify;
  Term left, right;         // Unify
  std::string predicate;    // Call
  std::vector<Term> args;   // Call
  SourcePos pos;

  // Source positions do not take part in structural equality.
  friend bool operator==(const Goal& a, const Goal& b) {
    return a.kind == b.kind && a.left == b.left && a.right == b.right &&
           a.predicate == b.predicate && a.args == b.args;
  }
  friend bool operator!=(const Goal& a, const Goal& b) { return !(a == b); }

  static Goal unify(Term l, Term r, SourcePos p = {}) {
    Goal g;
    g.kind = Kind::Unify;
    g.left = std::move(l);
    g.right = std::move(r);
    g.pos = p;
    return g;
  }
  static Goal call(std::string pred, std::vector<Term> as, SourcePos p = {}) {
    Goal g;
    g.kind = Kind::Call;
    g.predicate = std::move(pred);
    g.args = std::move(as);
    g.pos = p;
    return g;
  }
};

using GoalSeq = std::vector<Goal>;

/// One clause. The body is a disjunction of goal sequences; a fact parses
/// to a single empty sequence. In normal form the head arguments are
/// pairwise-distinct variables and distinct sequences share only head
/// variables.
struct Clause {
  std::string predicate;
  std::vector<Term> head_args;
  std::vector<GoalSeq> body;
  SourcePos pos;

  friend bool operator==(const Clause& a, const Clause& b) {
    return a.predicate == b.predicate && a.head_args == b.head_args && a.body == b.body;
  }
  friend bool operator!=(const Clause& a, const Clause& b) { return !(a == b); }
};

/// Surface type declaration `:- type name(params) = body.`
struct TypeDecl {
  std::string name;
  std::vector<std::string> params;
  SimpleType body;  // sum of constants and constructor applications
  SourcePos pos;

  friend bool operator==(const TypeDecl& a, const TypeDecl& b) {
    return a.name == b.name && a.params == b.params && a.body == b.body;
  }
  friend bool operator!=(const TypeDecl& a, const TypeDecl& b) { return !(a == b); }
};

/// A program: clauses in source order plus type declarations. After
/// normalization each predicate has exactly one clause.
struct Program {
  std::vector<Clause> clauses;
  std::vector<TypeDecl> type_decls;

  friend bool operator==(const Program&, const Program&) = default;

  /// Predicate names in order of first definition.
  std::vector<std::string> predicate_order() const;

  /// Clauses of one predicate, in source order.
  std::vector<const Clause*> clauses_of(const std::string& predicate) const;

  const Clause* single_clause(const std::string& predicate) const;

  bool defines(const std::string& predicate) const;
};

// -- Operations ----------------------------------------------------------

std::size_t or_degree(const Term&);
std::size_t or_degree(const Goal&);
std::size_t or_degree(const Clause&);

/// Renders a program as source text that reparses to an equal Program.
std::string pretty(const Program& p);
std::string pretty(const Clause& c);
std::string pretty(const Goal& g);
std::string pretty(const Term& t);

/// Variables of a syntactic object, in first-occurrence order.
void collect_vars(const Term& t, std::vector<std::string>& out, std::set<std::string>& seen);
void collect_vars(const Goal& g, std::vector<std::string>& out, std::set<std::string>& seen);
std::vector<std::string> vars_of(const GoalSeq& seq);
std::vector<std::string> vars_of(const Clause& c);

/// Clause-level alpha equivalence: identical up to a bijective renaming
/// of variables (branch structure and goal order must match).
bool alpha_equivalent(const Clause& a, const Clause& b);
bool alpha_equivalent(const Program& a, const Program& b);

}  // namespace trilog
