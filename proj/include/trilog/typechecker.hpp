#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trilog/ast.hpp"
#include "trilog/decls.hpp"
#include "trilog/types.hpp"

namespace trilog {

/// Typing assumptions with distinct variables as subjects.
using Context = std::map<std::string, SimpleType>;

/// Sum of contexts: disjoint subjects are copied, shared subjects get the
/// normalized sum of both types.
Context context_sum(const Context& g1, const Context& g2);

enum class Rule { VAR, CST, CPL, UNF, CLL, CON, CLS, RCLS };

std::string_view rule_name(Rule r);

/// One node of a typing derivation. Premises follow the rule schema; CLL
/// nodes additionally record the callee and the argument types required
/// of it.
struct Derivation {
  Rule rule = Rule::VAR;
  Context ctx;
  std::variant<Term, Goal, GoalSeq, Clause> subject;
  SimpleType type;  // Kind::Bool for goals and clauses
  std::vector<Derivation> premises;
  std::string callee;
  std::vector<SimpleType> callee_arg_types;

  bool contains_rule(Rule r) const;
};

struct Diagnostic {
  std::string kind;  // UnboundVariable, UnifyTypeMismatch, ...
  std::string predicate;
  int branch = -1;  // 0-based; -1 when not branch-specific
  std::string message;
  std::string expected;
  std::string found;
  SourcePos span;
};

/// Per-predicate outcome of check_program.
struct PredicateCheck {
  std::string predicate;
  bool ok = false;
  bool recursive = false;
  std::optional<TypeScheme> scheme;
  /// Per-branch contexts restricted to the branch's own variables; their
  /// context_sum over branches is the clause conclusion context.
  std::vector<Context> branch_contexts;
  std::vector<std::vector<SimpleType>> branch_head_types;
  std::optional<Derivation> derivation;
  std::vector<Diagnostic> errors;
};

struct CheckResult {
  bool ok = false;
  std::vector<std::string> order;  // predicates in checked (callee-first) order
  std::map<std::string, PredicateCheck> predicates;
  std::vector<Diagnostic> global;

  const PredicateCheck* find(const std::string& predicate) const {
    auto it = predicates.find(predicate);
    return it == predicates.end() ? nullptr : &it->second;
  }
};

/// Optional caller-provided branch contexts, bypassing reconstruction.
using Annotations = std::map<std::string, std::vector<Context>>;

/// Known predicate types for checking calls.
using PredicateTypes = std::map<std::string, TypeScheme>;

// -- Term and goal checking -------------------------------------------------

struct TermCheck {
  SimpleType type;
  Derivation derivation;
};

/// VAR/CST/CPL checking under a fixed context. Constants and constructors
/// are used at fresh instances of their declared types; the returned type
/// is the most general such instance.
std::variant<TermCheck, Diagnostic> check_term(const Context& ctx, const Term& t,
                                               const DeclaredTypes& decls);

/// UNF/CLL checking of one goal of a normalized clause. `self` names the
/// predicate being checked (for recursive calls) with its branch head
/// types; other callees resolve through `known`.
struct SelfInfo {
  std::string predicate;
  std::vector<SimpleType> head_types;
};

std::variant<Derivation, Diagnostic> check_goal(const Context& ctx, const Goal& g,
                                                const DeclaredTypes& decls,
                                                const PredicateTypes& known,
                                                const SelfInfo* self = nullptr);

/// CLS/RCLS: checks a normalized clause under given per-branch contexts
/// (each covering that branch's variables including the head variables).
std::variant<Derivation, Diagnostic> check_clause(const std::vector<Context>& branch_ctxs,
                                                  const Clause& c,
                                                  const DeclaredTypes& decls,
                                                  const PredicateTypes& known);

/// Solves the branch's unification and constructor constraints, binds
/// otherwise-unconstrained call arguments to the callee's argument types,
/// and assigns fresh type variables to variables left unconstrained.
std::variant<Context, Diagnostic> reconstruct_branch_context(
    const GoalSeq& branch, const std::vector<std::string>& head_vars,
    const DeclaredTypes& decls, const PredicateTypes& known, const SelfInfo* self,
    int* fresh_counter);

/// Checks every predicate in callee-first order; branch contexts come
/// from `annotations` when given, otherwise from reconstruction. Mutual
/// recursion is rejected with CyclicCallGraph.
CheckResult check_program(const Program& p, const DeclaredTypes& decls,
                          const Annotations* annotations = nullptr);

/// Independent re-verification of a derivation against the rule schemas.
/// Returns nullopt when valid.
std::optional<Diagnostic> validate_derivation(const Derivation& d,
                                              const DeclaredTypes& decls,
                                              const PredicateTypes& known);

}  // namespace trilog
