#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "trilog/decls.hpp"
#include "trilog/semantics.hpp"
#include "trilog/types.hpp"

namespace trilog {

struct TypeSemanticsError : std::runtime_error {
  explicit TypeSemanticsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Assignment of type variables to value sets. Free variables of a type
/// must be assigned before its semantics can be computed.
using TypeVarEnv = std::map<std::string, std::set<Value>>;

/// Environment assigning every free variable of t the union of all basic
/// and tree domain members.
TypeVarEnv upper_env(const SimpleType& t, const Universe& u);

/// Set-of-values semantics of a simple type. Mu types are computed as the
/// least fixpoint of the one-step unfolding, which stabilizes on the
/// finite universe. Constructor applications denote the trees built from
/// the argument sets that exist in the constructor's tree domain. Throws
/// TypeSemanticsError for unassigned type variables and for type
/// constants without an interpretation.
std::set<Value> tsem(const SimpleType& t, const Interpretation& i, const Universe& u,
                     const TypeVarEnv& env = {});

/// tsem with all free variables assigned the full basic-and-tree union.
std::set<Value> tsem_upper(const SimpleType& t, const Interpretation& i,
                           const Universe& u);

/// Iterates F(x) = tsem(body[x/binder]) from the empty set, recording
/// every iterate; the last two entries are equal once the fixpoint is
/// reached. t must be a Mu type.
std::vector<std::set<Value>> tsem_mu_trace(const SimpleType& t, const Interpretation& i,
                                           const Universe& u, const TypeVarEnv& env = {});

/// The ~ relation: the set of values related to t, or nullopt when t has
/// no associated domain (it contains bool).
std::optional<std::set<Value>> assoc_domain(const SimpleType& t, const Interpretation& i,
                                            const Universe& u, const TypeVarEnv& env = {});

/// Domain ids a type's values can inhabit, computed syntactically:
/// variables span every basic and tree domain, base types their bound
/// domain, constants the domain of their value, constructor applications
/// the constructor's tree domain.
std::set<std::string> spanned_domains(const SimpleType& t, const DeclaredTypes& decls,
                                      const Universe& u);

/// Ground simple types denotable in this universe: mapped base types plus
/// declared types instantiated over them, capped at `limit` candidates.
std::vector<SimpleType> ground_instance_candidates(const DeclaredTypes& decls,
                                                   const Universe& u,
                                                   std::size_t limit = 12);

/// Membership in the predicate-type semantics: true iff for every ground
/// instance of the scheme and every argument tuple drawn from the
/// instance's argument sets, applying the function lands in {true,false}.
bool psem_member(const FuncValue& p, const TypeScheme& scheme, const Interpretation& i,
                 const Universe& u, const std::vector<SimpleType>& ground_candidates);

bool psem_member(const FuncValue& p, const PredicateType& pt, const Interpretation& i,
                 const Universe& u, const std::vector<SimpleType>& ground_candidates);

}  // namespace trilog
