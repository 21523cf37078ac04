#pragma once

#include <stdexcept>
#include <string>

#include "trilog/ast.hpp"

namespace trilog {

struct NormalizeError : std::runtime_error {
  enum class Kind { UndefinedPredicate, ArityMismatch };

  Kind kind;
  std::string predicate;

  NormalizeError(Kind k, const std::string& pred, const std::string& msg)
      : std::runtime_error(msg), kind(k), predicate(pred) {}
};

/// True iff every predicate is defined by exactly one clause whose head
/// arguments are pairwise-distinct variables, every call argument is a
/// variable, and distinct goal sequences share only head variables.
bool is_normal(const Program& p);
bool is_normal_clause(const Clause& c);

/// Rewrites each multi-clause predicate into a single clause
/// `p(_A1,...,_An) :- sg1 ; ... ; sgm` where each original clause i
/// contributes sgi starting with head-argument unifications, every
/// predicate-call argument is flattened through a fresh variable, and the
/// sequences are renamed apart. Predicates already in normal form are
/// kept as written. Throws NormalizeError for calls to undefined
/// predicates and for clauses of one predicate with differing arities.
Program normalize(const Program& raw);

}  // namespace trilog
