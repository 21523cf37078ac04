#include "trilog/decls.hpp"

#include <cctype>

namespace trilog {

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

ConstructorType DeclaredTypes::constant_type(const std::string& symbol) const {
  if (const ConstructorType* t = type_of.find(symbol)) return *t;
  if (is_integer_literal(symbol)) return {{}, SimpleType::base("int")};
  return {{}, SimpleType::base("atom")};
}

const ConstructorType* DeclaredTypes::functor_type(const std::string& symbol) const {
  return type_of.find(symbol);
}

bool DeclaredTypes::has_tree_domain(const std::string& decl_name) const {
  for (const auto& [symbol, owner] : claimed_by) {
    (void)symbol;
    if (owner == decl_name) return true;
  }
  return false;
}

SimpleType DeclaredTypes::resolve(const SimpleType& t) const {
  switch (t.kind) {
    case SimpleType::Kind::Var:
    case SimpleType::Kind::Base:
    case SimpleType::Kind::Bool:
      return t;
    case SimpleType::Kind::Const: {
      auto it = named.find(t.name);
      if (it != named.end() && it->second.params.empty()) return it->second.translation;
      return t;
    }
    case SimpleType::Kind::Mu:
      return SimpleType::mu(t.name, resolve(t.mu_body()));
    case SimpleType::Kind::Sum: {
      std::vector<SimpleType> as;
      for (const auto& a : t.args) as.push_back(resolve(a));
      return SimpleType::sum(std::move(as));
    }
    case SimpleType::Kind::App: {
      std::vector<SimpleType> as;
      for (const auto& a : t.args) as.push_back(resolve(a));
      auto it = named.find(t.name);
      if (it != named.end()) {
        if (it->second.params.size() != as.size())
          throw DeclError("wrong arity in use of declared type " + t.name);
        TypeSubst phi;
        for (std::size_t k = 0; k < as.size(); ++k)
          phi[it->second.params[k]] = as[k];
        return subst(it->second.translation, phi);
      }
      return SimpleType::app(t.name, std::move(as));
    }
  }
  return t;
}

SimpleType DeclaredTypes::resugar(const SimpleType& t) const {
  for (const auto& [name, decl] : named) {
    if (auto phi = match_type(decl.translation, t)) {
      bool full = true;
      std::vector<SimpleType> args;
      for (const auto& p : decl.params) {
        auto it = phi->find(p);
        if (it == phi->end()) {
          full = false;
          break;
        }
        args.push_back(resugar(it->second));
      }
      if (full) {
        if (args.empty()) return SimpleType::constant(name);
        return SimpleType::app(name, std::move(args));
      }
    }
  }
  switch (t.kind) {
    case SimpleType::Kind::Sum: {
      std::vector<SimpleType> as;
      for (const auto& a : t.args) as.push_back(resugar(a));
      return SimpleType::sum(std::move(as));
    }
    case SimpleType::Kind::Mu:
      return SimpleType::mu(t.name, resugar(t.mu_body()));
    case SimpleType::Kind::App: {
      std::vector<SimpleType> as;
      for (const auto& a : t.args) as.push_back(resugar(a));
      return SimpleType::app(t.name, std::move(as));
    }
    default:
      return t;
  }
}

namespace {

// Rewrites self-references d(params...) to the mu binder; inlines earlier
// declarations; rejects forward references and non-uniform recursion.
struct DeclTranslator {
  const std::string& self;
  const std::vector<std::string>& params;
  const std::string& binder;
  const std::map<std::string, NamedDecl>& done;
  const std::set<std::string>& all_names;
  bool used_binder = false;

  SimpleType walk(const SimpleType& t) {
    switch (t.kind) {
      case SimpleType::Kind::Var:
      case SimpleType::Kind::Base:
        return t;
      case SimpleType::Kind::Bool:
        throw DeclError("bool may not occur in type declaration " + self);
      case SimpleType::Kind::Const: {
        if (t.name == self) {
          if (!params.empty())
            throw DeclError("recursive use of " + self + " must repeat its parameters");
          used_binder = true;
          return SimpleType::var(binder);
        }
        auto it = done.find(t.name);
        if (it != done.end()) {
          if (!it->second.params.empty())
            throw DeclError("wrong arity in use of declared type " + t.name);
          return it->second.translation;
        }
        if (all_names.count(t.name))
          throw DeclError("type " + t.name + " is used before its declaration");
        return t;
      }
      case SimpleType::Kind::Mu:
        return SimpleType::mu(t.name, walk(t.mu_body()));
      case SimpleType::Kind::Sum: {
        std::vector<SimpleType> as;
        for (const auto& a : t.args) as.push_back(walk(a));
        return SimpleType::sum(std::move(as));
      }
      case SimpleType::Kind::App: {
        if (t.name == self) {
          if (t.args.size() != params.size())
            throw DeclError("recursive use of " + self + " has wrong arity");
          for (std::size_t k = 0; k < t.args.size(); ++k)
            if (!(t.args[k].kind == SimpleType::Kind::Var && t.args[k].name == params[k]))
              throw DeclError("recursive use of " + self + " must repeat its parameters");
          used_binder = true;
          return SimpleType::var(binder);
        }
        std::vector<SimpleType> as;
        for (const auto& a : t.args) as.push_back(walk(a));
        auto it = done.find(t.name);
        if (it != done.end()) {
          if (it->second.params.size() != as.size())
            throw DeclError("wrong arity in use of declared type " + t.name);
          TypeSubst phi;
          for (std::size_t k = 0; k < as.size(); ++k)
            phi[it->second.params[k]] = as[k];
          return subst(it->second.translation, phi);
        }
        if (all_names.count(t.name))
          throw DeclError("type " + t.name + " is used before its declaration");
        return SimpleType::app(t.name, std::move(as));
      }
    }
    return t;
  }
};

}  // namespace

DeclaredTypes build_decl_table(const Program& p) {
  DeclaredTypes out;
  std::set<std::string> all_names;
  for (const auto& d : p.type_decls) all_names.insert(d.name);
  for (const auto& d : p.type_decls) {
    for (const auto& param : d.params)
      if (base_type_names().count(param))
        throw DeclError("type parameter shadows base type " + param + " in " + d.name);

    std::string binder = "%" + d.name;
    DeclTranslator tr{d.name, d.params, binder, out.named, all_names};
    SimpleType body = tr.walk(d.body);
    SimpleType translation = tr.used_binder ? SimpleType::mu(binder, body) : body;

    // Enter every constant and constructor summand into the type table.
    std::vector<SimpleType> summands =
        body.kind == SimpleType::Kind::Sum ? body.args : std::vector<SimpleType>{body};
    TypeSubst fold{{binder, translation}};
    for (const auto& s : summands) {
      if (s.kind == SimpleType::Kind::Const) {
        if (out.named.count(s.name)) continue;  // inlined earlier declaration
        if (!out.type_of.entries.emplace(s.name, ConstructorType{{}, translation}).second)
          throw DeclError("symbol " + s.name + " is declared by two types");
        out.claimed_by[s.name] = d.name;
      } else if (s.kind == SimpleType::Kind::App) {
        std::vector<SimpleType> args;
        for (const auto& a : s.args) args.push_back(subst(a, fold));
        if (!out.type_of.entries
                 .emplace(s.name, ConstructorType{std::move(args), translation})
                 .second)
          throw DeclError("symbol " + s.name + " is declared by two types");
        out.claimed_by[s.name] = d.name;
      }
      // Base/Var summands contribute no symbol.
    }
    out.named.emplace(d.name, NamedDecl{d.params, translation});
  }
  return out;
}

}  // namespace trilog
