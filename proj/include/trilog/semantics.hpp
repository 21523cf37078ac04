#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "trilog/ast.hpp"
#include "trilog/truth.hpp"

namespace trilog {

/// A ground semantic value: a member of a basic domain, a finite
/// constructor tree, a boolean, or wrong. Semantic functions are kept
/// separately (FuncValue); they only occur as interpretations of functor
/// and predicate symbols.
struct Value {
  enum class Kind : int { Base, Tree, Bool, Wrong };

  Kind kind = Kind::Wrong;
  std::string domain;           // Base: owning domain id
  std::string sym;              // Base: token, Tree: constructor
  std::vector<Value> children;  // Tree only
  bool truth = false;           // Bool only

  friend int compare(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Value& a, const Value& b) { return compare(a, b) != 0; }
  friend bool operator<(const Value& a, const Value& b) { return compare(a, b) < 0; }

  static Value base(std::string domain_id, std::string token) {
    Value v;
    v.kind = Kind::Base;
    v.domain = std::move(domain_id);
    v.sym = std::move(token);
    return v;
  }
  static Value tree(std::string ctor, std::vector<Value> ch = {}) {
    Value v;
    v.kind = Kind::Tree;
    v.sym = std::move(ctor);
    v.children = std::move(ch);
    return v;
  }
  static Value boolean(bool b) {
    Value v;
    v.kind = Kind::Bool;
    v.truth = b;
    return v;
  }
  static Value wrong() { return {}; }

  bool is_wrong() const { return kind == Kind::Wrong; }
};

/// Constructor nesting height: base values, booleans, and nullary trees
/// have depth 0; a constructor application is one deeper than its deepest
/// child.
int value_depth(const Value& v);

/// Term-style rendering (`s(0)`, `[1,2]`).
std::string to_string(const Value& v);

struct Domain {
  enum class Kind : int { Basic, Tree, Bool, Wrong };

  std::string id;
  Kind kind = Kind::Basic;
  std::vector<Value> members;  // sorted, unique

  bool contains(const Value& v) const;
};

/// A semantic function: argument positions accept values from unions of
/// whole domains; the finite table maps accepted tuples to results.
/// Predicate functions have result "bool".
struct FuncValue {
  std::vector<std::set<std::string>> signature;  // domain ids per position
  std::string result;
  std::map<std::vector<Value>, Value> table;
};

struct Interpretation {
  std::map<std::string, Value> constants;
  std::map<std::string, FuncValue> functions;
  std::map<std::string, FuncValue> predicates;
};

/// Variable valuation.
using State = std::map<std::string, Value>;

struct ConstructorSig {
  std::vector<SimpleType> arg_types;
  std::string result_domain;
};

/// The finite semantic universe: disjoint domains plus the base-type
/// association table and constructor ownership map.
struct Universe {
  std::vector<Domain> domains;  // basic and tree domains plus bool/wrong
  std::map<std::string, std::string> base_to_domain;
  std::map<std::string, ConstructorSig> constructors;  // ctor -> signature
  std::map<std::string, std::string> ctor_domain;      // ctor -> tree domain id
  int depth_bound = 3;
  std::size_t max_states = 1000000;

  const Domain* find_domain(const std::string& id) const;
  Domain* find_domain(const std::string& id);

  /// Id of the unique domain containing v ("bool"/"wrong" for those).
  /// Empty string if v belongs to no known domain.
  std::string domain_of(const Value& v) const;

  /// All members of basic and tree domains, sorted.
  std::vector<Value> enumerable_values() const;
};

struct EvalStats {
  std::size_t truncation = 0;  // table misses caused by the depth bound
};

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UniverseTooLarge : std::runtime_error {
  std::size_t cap;

  explicit UniverseTooLarge(std::size_t cap_)
      : std::runtime_error("state space exceeds the configured cap of " +
                           std::to_string(cap_)),
        cap(cap_) {}
};

// -- Evaluation ----------------------------------------------------------

Value eval_term(const Term& t, const Interpretation& i, const State& s,
                const Universe& u, EvalStats* stats = nullptr);

Tv eval_unify(const Term& t1, const Term& t2, const Interpretation& i, const State& s,
              const Universe& u, EvalStats* stats = nullptr);

Tv eval_call(const Goal& call, const Interpretation& i, const State& s,
             const Universe& u, EvalStats* stats = nullptr);

Tv eval_goal(const Goal& g, const Interpretation& i, const State& s, const Universe& u,
             EvalStats* stats = nullptr);

Tv eval_seq(const GoalSeq& goals, const Interpretation& i, const State& s,
            const Universe& u, EvalStats* stats = nullptr);

Tv eval_body(const std::vector<GoalSeq>& body, const Interpretation& i,
             const std::vector<State>& states, const Universe& u,
             EvalStats* stats = nullptr);

Tv eval_clause(const Clause& c, const Interpretation& i, const std::vector<State>& states,
               const Universe& u, EvalStats* stats = nullptr);

// -- State enumeration -----------------------------------------------------

/// Streams every total assignment of `vars` to the candidate values, each
/// exactly once. Throws UniverseTooLarge on construction if the product
/// exceeds `cap`.
class StateEnumerator {
 public:
  StateEnumerator(std::vector<std::string> vars,
                  std::vector<std::vector<Value>> candidates, std::size_t cap);

  std::size_t count() const { return count_; }

  /// Advances to the next assignment, updating `out` in place (pass the
  /// same State object on every call); returns false when exhausted.
  /// Entries under other keys are preserved.
  bool next(State& out);

 private:
  std::vector<std::string> vars_;
  std::vector<std::vector<Value>> candidates_;
  std::vector<std::size_t> index_;
  std::size_t count_ = 0;
  bool done_ = false;
  bool started_ = false;
};

/// Enumerates assignments of the variables to every member of the
/// universe's basic and tree domains.
StateEnumerator enumerate_states(const std::vector<std::string>& vars, const Universe& u);

}  // namespace trilog
