#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace trilog {

/// A simple type: type variable, type constant, base type, the reserved
/// bool type, a sum, a mu-recursive type, or a constructor application.
struct SimpleType {
  enum class Kind : int { Var, Const, Base, Bool, Sum, Mu, App };

  Kind kind = Kind::Base;
  std::string name;              // Var/Base/Const: the symbol; Mu: binder; App: constructor
  std::vector<SimpleType> args;  // Sum: summands (>= 2); Mu: single body; App: arguments

  friend int compare(const SimpleType& a, const SimpleType& b);
  friend bool operator==(const SimpleType& a, const SimpleType& b) {
    return compare(a, b) == 0;
  }
  friend bool operator!=(const SimpleType& a, const SimpleType& b) {
    return compare(a, b) != 0;
  }
  friend bool operator<(const SimpleType& a, const SimpleType& b) {
    return compare(a, b) < 0;
  }

  static SimpleType var(std::string n) { return {Kind::Var, std::move(n), {}}; }
  static SimpleType constant(std::string n) { return {Kind::Const, std::move(n), {}}; }
  static SimpleType base(std::string n) { return {Kind::Base, std::move(n), {}}; }
  static SimpleType boolean() { return {Kind::Bool, "bool", {}}; }
  static SimpleType sum(std::vector<SimpleType> summands);
  static SimpleType mu(std::string binder, SimpleType body) {
    return {Kind::Mu, std::move(binder), {std::move(body)}};
  }
  static SimpleType app(std::string functor, std::vector<SimpleType> as) {
    return {Kind::App, std::move(functor), std::move(as)};
  }

  const SimpleType& mu_body() const { return args.front(); }
};

/// Predicate type: tuple of argument types into bool.
struct PredicateType {
  std::vector<SimpleType> arg_types;

  friend bool operator==(const PredicateType& a, const PredicateType& b) {
    return a.arg_types == b.arg_types;
  }
  friend bool operator!=(const PredicateType& a, const PredicateType& b) {
    return !(a == b);
  }
  friend bool operator<(const PredicateType& a, const PredicateType& b) {
    return a.arg_types < b.arg_types;
  }
};

/// Universally quantified predicate type. Quantifiers are implicit in
/// printed output.
struct TypeScheme {
  std::set<std::string> quantified;
  PredicateType body;
};

/// Declared type of a constant (no arguments) or term constructor.
struct ConstructorType {
  std::vector<SimpleType> arg_types;  // empty for constants
  SimpleType result;
};

/// `type` function: maps constant and functor symbols to declared types.
struct TypeDeclTable {
  std::map<std::string, ConstructorType> entries;

  const ConstructorType* find(const std::string& symbol) const {
    auto it = entries.find(symbol);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// -- Structural helpers ------------------------------------------------

/// Flattens nested sums, drops duplicate summands, and sorts summands by
/// a fixed total order. A single remaining summand collapses to itself.
SimpleType normalize_sum(const SimpleType& t);

/// Free type variables (Mu binders are binding occurrences).
void free_type_vars(const SimpleType& t, std::set<std::string>& out);
std::set<std::string> free_type_vars(const SimpleType& t);
std::set<std::string> free_type_vars(const PredicateType& t);

using TypeSubst = std::map<std::string, SimpleType>;

/// Capture-avoiding simultaneous substitution of type variables.
SimpleType subst(const SimpleType& t, const TypeSubst& phi);
PredicateType subst(const PredicateType& t, const TypeSubst& phi);

/// Structural equality modulo sum normalization and alpha-renaming of Mu
/// binders.
bool type_equal(const SimpleType& a, const SimpleType& b);

/// Canonical form: sums normalized, Mu binders renamed to positional
/// names. Two types are type_equal iff their canonical forms are ==.
SimpleType canonical(const SimpleType& t);

/// One-sided matching: finds phi over `pattern`'s free type variables
/// with subst(pattern, phi) == target (modulo type_equal). Variables
/// bind consistently; `target` is treated as rigid.
std::optional<TypeSubst> match_type(const SimpleType& pattern, const SimpleType& target);

/// Unfolds a Mu type one step: mu a. T  ->  T[mu a. T / a].
SimpleType unfold_mu(const SimpleType& t);

/// True if bool occurs anywhere inside t.
bool contains_bool(const SimpleType& t);

// -- Printing and parsing ----------------------------------------------

/// Renders as `int + atom`, `mu a. ([] + [int|a])`,
/// `[H|T]` constructor apps printed with list sugar.
std::string to_string(const SimpleType& t);
std::string to_string(const PredicateType& t);
std::string to_string(const TypeScheme& t);

struct TypeParseError : std::runtime_error {
  explicit TypeParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Known base type names recognized by the type parser.
const std::set<std::string>& base_type_names();

/// Parses a standalone type expression. Accepts simple types and
/// predicate types (`t1 * t2 -> bool`). Lowercase identifiers resolve to
/// base types when known, otherwise to type variables; uppercase
/// identifiers are always type variables; integers and quoted atoms are
/// type constants. Throws TypeParseError.
struct ParsedType {
  std::optional<SimpleType> simple;
  std::optional<PredicateType> predicate;
};
ParsedType parse_type(const std::string& text);

/// Parses a simple type only; throws if the text denotes a predicate type.
SimpleType parse_simple_type(const std::string& text);

}  // namespace trilog
