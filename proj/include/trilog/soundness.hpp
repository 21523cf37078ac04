#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trilog/decls.hpp"
#include "trilog/semantics.hpp"
#include "trilog/type_semantics.hpp"
#include "trilog/typechecker.hpp"

namespace trilog {

// -- Semantic typing of values and contexts -----------------------------------

/// Definition of a value having a type: membership in the type's value
/// set. wrong has no type.
bool value_has_type(const Value& v, const SimpleType& t, const Interpretation& i,
                    const Universe& u, const TypeVarEnv& env = {});

/// All assumptions of the context hold in the state.
bool context_holds(const Context& g, const Interpretation& i, const State& s,
                   const Universe& u, const TypeVarEnv& env = {});

// -- Canonical interpretation --------------------------------------------------

struct UniverseConfig {
  enum class Policy { ByType, Singleton, Herbrand };

  Policy policy = Policy::ByType;
  int depth_bound = 3;
  std::size_t max_states = 1000000;
  std::size_t max_universe_values = 20000;
  /// Extra basic-domain tokens per base type (ByType policy).
  std::map<std::string, std::vector<std::string>> extra_tokens;
};

struct BuildResult {
  Interpretation interpretation;
  Universe universe;
};

/// Per-iteration snapshots of each predicate's true tuples.
using BuildTrace = std::vector<std::map<std::string, std::set<std::vector<Value>>>>;

/// Constructs the canonical interpretation: basic domains from the
/// program's constants (plus configured extras), depth-bounded tree
/// domains closed under the declared constructors, free constructor
/// tables, and predicate tables computed as the least fixpoint of the
/// clause semantics starting from all-false. Predicate signatures come
/// from checked types when `checked` is given, otherwise each argument
/// accepts every basic and tree domain.
BuildResult build_interpretation(const Program& p, const DeclaredTypes& decls,
                                 const UniverseConfig& config,
                                 const CheckResult* checked = nullptr,
                                 BuildTrace* trace = nullptr);

// -- Semantic typing check (context splits + state enumeration) -----------------

struct Counterexample {
  std::size_t branch = 0;
  State state;
  std::string detail;
};

struct SemanticTypingReport {
  bool holds = false;
  bool vacuous = false;
  std::vector<Context> witness_split;
  std::size_t states_checked = 0;
  std::size_t wrong_count = 0;       // non-truncation wrong outcomes
  std::size_t truncation_count = 0;  // wrong outcomes tied to the depth bound
  std::optional<Counterexample> counterexample;
};

/// Searches for a context split proving the clause semantically bool
/// typed: every state list satisfying the split keeps every branch body
/// and head call away from wrong. Splits are tried starting from
/// `preferred` (normally the checker's branch contexts), then over sum
/// decompositions of the context's assumptions, up to `split_cap`
/// candidates.
SemanticTypingReport semantic_typing_check(const Context& ctx, const Clause& c,
                                           const Interpretation& i, const Universe& u,
                                           const std::vector<Context>* preferred = nullptr,
                                           std::size_t split_cap = 4096);

/// Degree-1 variant for terms: every state satisfying the context must
/// give the term a value inside the type's value set.
SemanticTypingReport semantic_typing_check(const Context& ctx, const Term& t,
                                           const SimpleType& type,
                                           const Interpretation& i, const Universe& u);

/// Degree-1 variant for goals (the type is bool: the goal value must stay
/// away from wrong).
SemanticTypingReport semantic_typing_check(const Context& ctx, const Goal& g,
                                           const Interpretation& i, const Universe& u);

// -- Soundness harness -----------------------------------------------------------

struct PredicateVerdict {
  std::string predicate;
  std::string status;  // "ok" | "violation" | "truncated"
  std::size_t states_checked = 0;
  std::size_t wrong_count = 0;
  std::size_t truncation_count = 0;
  std::vector<Context> witness_split;
  std::optional<Counterexample> counterexample;
};

struct VerifyReport {
  bool ok = false;
  std::vector<PredicateVerdict> predicates;

  const PredicateVerdict* find(const std::string& p) const {
    for (const auto& v : predicates)
      if (v.predicate == p) return &v;
    return nullptr;
  }
};

/// Runs the per-clause semantic typing check against the canonical
/// interpretation for every predicate of a program accepted by
/// check_program. A violation indicates an implementation bug and is
/// reported with its counterexample; wrong outcomes caused by the depth
/// bound land in the truncation bucket and do not fail the predicate.
VerifyReport verify_soundness(const Program& p, const DeclaredTypes& decls,
                              const UniverseConfig& config, const CheckResult& checked);

// -- Program generator -------------------------------------------------------------

struct GenParams {
  int max_predicates = 3;
  int max_branches = 3;
  int max_goals = 4;
  int max_arity = 3;
  bool allow_recursion = true;
  /// Roughly this fraction of programs gets a deliberate domain clash.
  int illtyped_percent = 25;
};

/// Deterministic, seed-driven normalized program with matching type
/// declarations. Output is biased toward well-typed programs; whether a
/// particular program checks is decided by running check_program on it.
Program generate_program(std::uint64_t seed, const GenParams& params = {});

}  // namespace trilog
