#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "trilog/ast.hpp"
#include "trilog/types.hpp"

namespace trilog {

struct DeclError : std::runtime_error {
  explicit DeclError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A translated type declaration: `:- type list(A) = [] + [A|list(A)].`
/// becomes `mu b. ([] + [A|b])` with params {A}.
struct NamedDecl {
  std::vector<std::string> params;
  SimpleType translation;
};

/// The `type` function plus the named declarations it came from.
/// Undeclared constants default to `int` (integer literals) or `atom`.
struct DeclaredTypes {
  TypeDeclTable type_of;
  std::map<std::string, NamedDecl> named;      // declaration name -> translation
  std::map<std::string, std::string> claimed_by;  // symbol -> declaration name

  /// Declared or defaulted type of a constant symbol.
  ConstructorType constant_type(const std::string& symbol) const;

  /// True when the declaration owns at least one constant or constructor
  /// (and so induces a tree domain).
  bool has_tree_domain(const std::string& decl_name) const;

  /// Declared type of a functor, nullptr when undeclared.
  const ConstructorType* functor_type(const std::string& symbol) const;

  /// Replaces applications of declared names inside t by their (folded)
  /// translations.
  SimpleType resolve(const SimpleType& t) const;

  /// Inverse of resolve for printing: rewrites subterms that match a
  /// declared translation back to `name(args)` form.
  SimpleType resugar(const SimpleType& t) const;
};

bool is_integer_literal(const std::string& s);

/// Translates the program's type declarations. Recursive occurrences of
/// the declared name (applied to exactly its parameters) become a mu
/// binder; references to earlier declarations are inlined. Each constant
/// or constructor summand is entered into the `type` function with the
/// folded declared type as result. Throws DeclError on forward
/// references, non-uniform recursion, bool occurrences, and symbols
/// claimed by two declarations.
DeclaredTypes build_decl_table(const Program& p);

}  // namespace trilog
