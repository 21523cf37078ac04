#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trilog/type_semantics.hpp"
#include "trilog/types.hpp"

namespace trilog {

/// Decision procedure for the subtyping relation: reflexivity, instance
/// (a substitution on the supertype's variables), the two union rules,
/// and contravariance on predicate types. Mu types are compared by
/// memoized unfolding with an assumption set. Sound but not complete for
/// every derivable pair; `trace` records the rules applied.
bool is_subtype(const SimpleType& sub, const SimpleType& sup,
                std::vector<std::string>* trace = nullptr);

bool is_subtype(const PredicateType& sub, const PredicateType& sup,
                std::vector<std::string>* trace = nullptr);

/// Executable soundness check: when is_subtype holds, the value sets must
/// be contained. Reports a counterexample value otherwise.
struct SubtypeSoundnessReport {
  bool subtype = false;       // is_subtype verdict
  bool containment = true;    // semantic containment (when subtype holds)
  std::optional<Value> counterexample;

  bool ok() const { return !subtype || containment; }
};

SubtypeSoundnessReport check_subtype_soundness(const SimpleType& sub,
                                               const SimpleType& sup,
                                               const Interpretation& i,
                                               const Universe& u);

/// Predicate-type variant: enumerates all candidate tables over the
/// subtype's argument sets and checks each member of the subtype's
/// semantics is a member of the supertype's. Intended for tiny universes.
struct PredicateSoundnessReport {
  bool subtype = false;
  bool containment = true;
  std::size_t tables_checked = 0;
};

PredicateSoundnessReport check_subtype_soundness(const PredicateType& sub,
                                                 const PredicateType& sup,
                                                 const Interpretation& i,
                                                 const Universe& u);

}  // namespace trilog
